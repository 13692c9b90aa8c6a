use tailind::exceedance::{block_scheme, cluster_stats, extract, extract_r};
use tailind::panelgen::{read_panel, write_panel, DependenceModel, InnovationLaw, PanelGenerator, PanelSpec};
use tailind::studentize::{studentize_moments, studentize_panel, t_level_to_r_level, write_csv};

fn spec() -> PanelSpec {
    PanelSpec::new(3000, 30, DependenceModel::MovingAverage { kappa: 4 }, InnovationLaw::StandardNormal)
        .with_seed(99)
        .with_replicate(5)
        .with_offsets(vec![(10, 1.5), (2000, 2.0)])
}

#[test]
fn file_round_trip_then_studentize_matches_streaming() {
    let gen = PanelGenerator::new(spec()).unwrap();
    let panel = gen.generate(5);
    let mut bytes = Vec::new();
    write_panel(&panel, &mut bytes).unwrap();
    assert_eq!(bytes.len(), 48 + 8 * 3000 * 30);
    let back = read_panel(bytes.as_slice()).unwrap();
    assert_eq!((back.p, back.n, back.seed, back.replicate), (3000, 30, 99, 5));

    let from_file = studentize_panel(&back).unwrap();
    let streamed: Vec<_> = gen.moments(5).iter().enumerate().map(|(i, m)| studentize_moments(i, m)).collect();
    for (a, b) in from_file.iter().zip(&streamed) {
        assert_eq!(a.t.to_bits(), b.t.to_bits(), "row {}", a.index);
        assert_eq!(a.r.to_bits(), b.r.to_bits());
    }
    // Shifted rows stand out.
    assert!(from_file[10].t > 3.0 && from_file[2000].t > 3.0);
}

#[test]
fn exceedences_and_blocks_agree_across_scales() {
    let gen = PanelGenerator::new(spec()).unwrap();
    let rows: Vec<_> = gen.moments(0).iter().enumerate().map(|(i, m)| studentize_moments(i, m)).collect();
    let t = 2.0;
    let by_t = extract(&rows, t);
    let by_r = extract_r(&rows, t_level_to_r_level(t, 30));
    assert_eq!(by_t.indices, by_r.indices);
    assert!(!by_t.is_empty());

    let scheme = block_scheme(3000, 4, t_level_to_r_level(t, 30)).unwrap();
    let stats = cluster_stats(&by_t, &scheme).unwrap();
    assert_eq!(stats.total, by_t.len());
    assert!(stats.max_in_block >= 1);
    assert!(stats.large_blocks_hit <= scheme.m);

    let mut csv = Vec::new();
    write_csv(&rows[..3], &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: tailind.studentize/1"));
    assert_eq!(lines.next(), Some("i,mean,scale,T,R,degenerate"));
    assert!(lines.next().unwrap().starts_with("1,"));
}
