mod common;

use common::{config, fixture};
use trackeval::dataset::{open_frame_stream, Eye};
use trackeval::groundtruth::{make_ground_truth, make_ground_truth_all, GroundTruth, GtConfig};
use trackeval::synth::Motion;
use trackeval::Execution;

#[test]
fn loader_reproduces_manifest() {
    let mut cfg = config(3, 4, Motion::Static);
    cfg.image_width = 320;
    cfg.image_height = 256;
    cfg.stereo.depth_range_m = [0.1, 0.2];
    let fx = fixture(&cfg);
    let ds = &fx.dataset;
    assert!(ds.skipped.is_empty(), "{:?}", ds.skipped);
    assert_eq!(ds.sequences.len(), 3);
    assert_eq!(ds.summary.total_points, fx.manifest.total_points());
    for seq in &ds.sequences {
        let m = fx.entry(&seq.sequence_id);
        assert_eq!(seq.session_id, m.session_id);
        assert_eq!(seq.frame_count(), m.frames);
        assert_eq!(seq.point_count, m.point_count);
        assert_eq!((seq.start_ms, seq.end_ms), (m.start_ms, m.end_ms));
        assert_eq!([seq.frame_size.0, seq.frame_size.1], m.image_size);
        assert!(!seq.is_nominal_size());
    }
}

#[test]
fn ten_frame_stream_ends_after_ten() {
    let mut cfg = config(1, 10, Motion::Static);
    cfg.image_width = 320;
    cfg.image_height = 256;
    cfg.stereo.depth_range_m = [0.1, 0.2];
    let fx = fixture(&cfg);
    let mut stream = open_frame_stream(&fx.dataset.sequences[0], Eye::Left).unwrap();
    let mut seen = Vec::new();
    while let Some(f) = stream.next_frame().unwrap() {
        seen.push(f.index);
    }
    assert_eq!(seen, (0..10).collect::<Vec<_>>());
    assert!(stream.next_frame().unwrap().is_none());
}

fn assert_closure(gt: &GroundTruth, m: &trackeval::synth::SequenceManifest) {
    assert_eq!(gt.start.len(), m.points.len());
    assert_eq!(gt.end.len(), m.points.len());
    for (g, p) in gt.start.iter().zip(&m.points) {
        assert!(g.left.distance(&p.start_left) < 0.5, "{:?} vs {:?}", g.left, p.start_left);
        let mm = g.position_mm.expect("start point matched");
        assert!(mm.distance(&p.start_mm) < 0.01, "{mm:?} vs {:?}", p.start_mm);
        assert_eq!(g.disparity_px, Some(p.disparity_px));
    }
    for (g, p) in gt.end.iter().zip(&m.points) {
        assert!(g.left.distance(&p.end_left) < 0.5);
        let mm = g.position_mm.expect("end point matched");
        assert!(mm.distance(&p.end_mm) < 0.01, "{mm:?} vs {:?}", p.end_mm);
    }
}

#[test]
fn ground_truth_closes_on_synthetic_data() {
    let fx = fixture(&config(3, 3, Motion::Translation { dx: 3.0, dy: -2.0 }));
    let gts = make_ground_truth_all(&fx.dataset.sequences, &GtConfig::default(), Execution::Parallel, true);
    for gt in &gts {
        let gt = gt.as_ref().unwrap();
        let m = fx.entry(&gt.sequence_id);
        assert!(gt.consistency.is_clean());
        assert_closure(gt, m);
    }
    // Written files re-read identically.
    for (seq, gt) in fx.dataset.sequences.iter().zip(&gts) {
        assert_eq!(&GroundTruth::read(&seq.gt_path()).unwrap(), gt.as_ref().unwrap());
    }
}

#[test]
fn spurious_start_speck_is_flagged() {
    let mut cfg = config(1, 2, Motion::Static);
    cfg.spurious_start_blobs = 1;
    let fx = fixture(&cfg);
    let m = &fx.manifest.sequences[0];
    assert_eq!(m.point_count, cfg.blobs + 1);
    let gt = make_ground_truth(&fx.dataset.sequences[0], &GtConfig::default()).unwrap();
    assert_eq!(gt.consistency.start_flagged.len(), 1);
    let flagged = &gt.start[gt.consistency.start_flagged[0]];
    assert!(flagged.flagged);
    assert!(flagged.left.distance(&m.spurious_start[0]) < 0.5);
    assert!(gt.consistency.end_flagged.is_empty());
}
