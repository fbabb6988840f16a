use flowcomm::baseline::{pca_kmeans, KMeansConfig, Padding};
use flowcomm::community::{detect, LouvainConfig, Variant};
use flowcomm::csng::{build_csng, CsngConfig};
use flowcomm::neighbor::{NeighborQueryConfig, ProximityMeasure};
use flowcomm::session::{Command, Session, SessionConfig};
use flowcomm::synth::{vortex, VortexParams};
use flowcomm::Level;

/// Everything a run produces, serialized.
fn run_everything() -> Vec<Vec<u8>> {
    let set = vortex(&VortexParams {
        axes: 3,
        lines_per_axis: 12,
        points_per_line: 120,
        turns: 3.0,
        seed: 11,
    })
    .unwrap();
    let mut out = Vec::new();
    for (level, measure) in [
        (Level::Segment, ProximityMeasure::Longest),
        (Level::SubCurve, ProximityMeasure::Average),
        (Level::Streamline, ProximityMeasure::Shortest),
    ] {
        let g = build_csng(&set, level, &CsngConfig::new(NeighborQueryConfig::knn(8, measure))).unwrap();
        let mut bin = Vec::new();
        g.write_binary(&mut bin).unwrap();
        out.push(bin);
        let variant = match level {
            Level::Segment => Variant::Segment,
            Level::SubCurve => Variant::SubCurve,
            Level::Streamline => Variant::Streamline,
        };
        let config = LouvainConfig { seed: 5, restarts: 3, ..Default::default() };
        let p = detect(&set, &g, variant, &config).unwrap();
        out.push(serde_json::to_vec(&(&p.assignment, p.modularity.to_bits())).unwrap());
    }
    let rbn = build_csng(&set, Level::Segment, &CsngConfig::new(NeighborQueryConfig::rbn(0.8, ProximityMeasure::Longest))).unwrap();
    let mut bin = Vec::new();
    rbn.write_binary(&mut bin).unwrap();
    out.push(bin);

    let km = KMeansConfig { k_c: 3, max_iters: 100, variance_retained: 0.95, seed: 2, n_init: 4 };
    let (r, comps) = pca_kmeans(&set, Level::Streamline, 32, Padding::Resample, &km).unwrap();
    out.push(serde_json::to_vec(&(&r.assignment, r.wcss.to_bits(), comps)).unwrap());

    let config: SessionConfig = serde_json::from_str(r#"{"strategy":"knn","k":6,"level":"streamline"}"#).unwrap();
    let mut s = Session::create("det", std::sync::Arc::new(set), config).unwrap();
    let first = s.leaves()[0].node_id;
    s.apply(Command::Split { node: first, config: None }).unwrap();
    out.push(serde_json::to_vec(&s.transcript()).unwrap());
    out.push(serde_json::to_vec(&s.summary_graph()).unwrap());
    out.push(serde_json::to_vec(&s.element_colors()).unwrap());
    out
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let reference = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run_everything);
    for threads in [2, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let got = pool.install(run_everything);
        assert_eq!(got.len(), reference.len());
        for (i, (a, b)) in reference.iter().zip(&got).enumerate() {
            assert!(a == b, "output {i} differs with {threads} threads");
        }
    }
}
