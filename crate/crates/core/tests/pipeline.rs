use dynramsey::action::{Action, ShiftDistance, ShiftSystem, DEFAULT_ENUMERATION_CAP};
use dynramsey::cliques::{mono_clique_report, opposite_upper_bound};
use dynramsey::colorer::{
    color_graph, decode_decg, encode_decg, graph_checksum, revalidate, shift_vertex_set, Sampling,
};
use dynramsey::sepset::s_count_shift_exact;

#[test]
fn full_graph_at_radius_one() {
    let sys = ShiftSystem::binary();
    let (set, sampling) = shift_vertex_set(&sys, 1, None, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(sampling, Sampling::Full);
    assert_eq!(set.len() as u64, 512);
    assert_eq!(s_count_shift_exact(2, 1).unwrap(), 512u32.into());

    let g = color_graph(&sys, &set, 1, sampling, true).unwrap();
    assert_eq!(g.edge_count(), 130816);
    assert!(g.colors_used() <= 9);
    assert!(revalidate(&g).unwrap().is_none());
    // Every pair of w=3 patterns can be shifted to differ at the origin.
    assert!(g
        .edges()
        .all(|(i, j)| g.achieved(i, j) == ShiftDistance::Exponent(0)));

    let report = mono_clique_report(&g).unwrap();
    assert_eq!(report.overall_max, 2);
    let cert = report.separation_certificate.as_ref().unwrap();
    assert!(cert.separated);

    let ub = opposite_upper_bound(&report, &g).unwrap();
    assert_eq!(ub.bound, 2);
    let c = ub.certificate.unwrap();
    assert_eq!(c.statement, "R_9(3) > 512");
    assert!(c.verified);
    assert_eq!(c.graph_checksum, graph_checksum(&g));

    let text = encode_decg(&g);
    assert_eq!(encode_decg(&decode_decg(&text).unwrap()), text);
}

fn sampled_max_clique(n: u32, m: u64) -> usize {
    let sys = ShiftSystem::binary();
    let (set, sampling) = shift_vertex_set(&sys, n, Some((m, 7)), 1 << 20).unwrap();
    assert_eq!(set.len() as u64, m);
    let g = color_graph(&sys, &set, n, sampling, true).unwrap();
    assert_eq!(g.palette_size(), (2 * n + 1).pow(2));
    assert!(revalidate(&g).unwrap().is_none());
    assert!(g.edges().all(|(i, j)| sys.is_separated(g.achieved(i, j))));
    mono_clique_report(&g).unwrap().overall_max
}

#[test]
fn sampled_cliques_stay_bounded() {
    assert_eq!(sampled_max_clique(2, 1000), 2);
    assert_eq!(sampled_max_clique(3, 500), 2);
}

#[test]
fn sampled_graph_is_reproducible() {
    let sys = ShiftSystem::binary();
    let build = || {
        let (set, sampling) = shift_vertex_set(&sys, 2, Some((200, 3)), 1 << 20).unwrap();
        encode_decg(&color_graph(&sys, &set, 2, sampling, false).unwrap())
    };
    let a = build();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(build);
    assert_eq!(a, b);
    assert!(a.contains("sampled subsampled seed=3"));
}

#[test]
fn unsampled_radius_two_exceeds_small_cap() {
    let sys = ShiftSystem::binary();
    let err = shift_vertex_set(&sys, 2, None, 5000).unwrap_err();
    assert!(matches!(err, dynramsey::Error::CapExceeded { .. }));
    assert!(err.to_string().contains("33554432"), "{err}");
    assert!(sys.scale(2) > sys.scale(3));
}
