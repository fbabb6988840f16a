use std::ffi::{CStr, CString};
use std::ptr;

use flowcomm_ffi::*;

fn last_error() -> String {
    let p = fc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    fc_string_free(p);
    s
}

#[test]
fn bundles_round_trip_through_the_abi() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(fc_synth_bundles(2, 6, 20, 100.0, 0.1, 0, &mut ds), FcStatus::Ok);
        assert_eq!(fc_dataset_streamline_count(ds), 12);
        assert_eq!(fc_dataset_segment_count(ds), 12 * 19);

        let mut g = ptr::null_mut();
        assert_eq!(
            fc_csng_build(ds, FcLevel::Streamline, 3, 0.0, FcMeasure::Longest, 8, &mut g),
            FcStatus::Ok
        );
        assert_eq!(fc_csng_node_count(g), 12);
        assert!(fc_csng_is_directed(g));

        let mut p = ptr::null_mut();
        assert_eq!(fc_detect(ds, g, FcVariant::Streamline, 1.0, 0, &mut p), FcStatus::Ok);
        assert_eq!(fc_partition_community_count(p), 2);
        let n = fc_partition_len(p);
        let mut assignment = vec![0usize; n];
        assert_eq!(fc_partition_assignment(p, assignment.as_mut_ptr(), n), FcStatus::Ok);
        let mut labels = vec![0i64; n];
        assert_eq!(fc_dataset_labels(ds, labels.as_mut_ptr(), n), FcStatus::Ok);
        let mut wj = 0.0;
        assert_eq!(fc_weighted_jaccard(assignment.as_ptr(), labels.as_ptr(), n, &mut wj), FcStatus::Ok);
        assert_eq!(wj, 1.0);
        assert!(fc_partition_modularity(p) > 0.4);

        fc_partition_free(p);
        fc_csng_free(g);
        fc_dataset_free(ds);
    }
}

#[test]
fn sessions_through_the_abi() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(fc_synth_bundles(2, 6, 20, 100.0, 0.1, 0, &mut ds), FcStatus::Ok);
        let cfg = CString::new(r#"{"strategy":"knn","k":3,"level":"streamline"}"#).unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(fc_session_create(ds, cfg.as_ptr(), &mut s), FcStatus::Ok);
        assert_eq!(fc_session_leaf_count(s), 2);

        let split = CString::new(r#"{"op":"split","args":{"node":0}}"#).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(fc_session_apply(s, split.as_ptr(), &mut out), FcStatus::Ok);
        assert!(take_string(out).contains("children"));

        let bad = CString::new(r#"{"op":"collapse","args":{"node":1}}"#).unwrap();
        assert_eq!(fc_session_apply(s, bad.as_ptr(), &mut out), FcStatus::Conflict);
        assert!(last_error().contains('1'));

        let mut colors = vec![0u64; fc_dataset_segment_count(ds)];
        assert_eq!(fc_session_colors(s, colors.as_mut_ptr(), colors.len()), FcStatus::Ok);
        assert_eq!(fc_session_colors(s, colors.as_mut_ptr(), 3), FcStatus::InvalidArgument);

        let mut summary = ptr::null_mut();
        assert_eq!(fc_session_summary_json(s, &mut summary), FcStatus::Ok);
        assert!(take_string(summary).starts_with("{\"nodes\""));
        let mut export = ptr::null_mut();
        assert_eq!(fc_session_export_json(s, &mut export), FcStatus::Ok);
        assert!(take_string(export).contains("\"history\""));

        fc_session_free(s);
        fc_dataset_free(ds);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut ds = ptr::null_mut();
        let nan = CString::new(r#"{"streamlines":[[[0,0,0],[1,1,"x"]]]}"#).unwrap();
        assert_eq!(fc_dataset_from_json(nan.as_ptr(), &mut ds), FcStatus::MalformedInput);
        assert!(ds.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(fc_dataset_from_json(ptr::null(), &mut ds), FcStatus::NullPointer);

        let empty = CString::new(r#"{"streamlines":[]}"#).unwrap();
        assert_eq!(fc_dataset_from_json(empty.as_ptr(), &mut ds), FcStatus::EmptyDataset);

        let xyz = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        let lengths = [2usize, 2];
        assert_eq!(fc_dataset_from_points(xyz.as_ptr(), lengths.as_ptr(), 2, &mut ds), FcStatus::Ok);
        assert_eq!(fc_dataset_segment_count(ds), 2);

        let mut g = ptr::null_mut();
        assert_eq!(
            fc_csng_build(ds, FcLevel::Segment, 0, 0.0, FcMeasure::Shortest, 8, &mut g),
            FcStatus::Ok
        );
        assert!(!fc_csng_is_directed(g));
        let mut p = ptr::null_mut();
        assert_eq!(fc_detect(ds, g, FcVariant::SubCurve, 1.0, 0, &mut p), FcStatus::LevelMismatch);
        assert_eq!(fc_detect(ds, g, FcVariant::Segment, -1.0, 0, &mut p), FcStatus::InvalidArgument);

        let mut labels = [0i64; 2];
        assert_eq!(fc_dataset_labels(ds, labels.as_mut_ptr(), 2), FcStatus::InvalidArgument);

        assert_eq!(fc_dataset_streamline_count(ptr::null()), 0);
        fc_csng_free(g);
        fc_dataset_free(ds);
        fc_dataset_free(ptr::null_mut());
        assert!(!CStr::from_ptr(fc_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/flowcomm.h");
    let text = std::fs::read_to_string(&header).expect("header generated by the build script");
    for symbol in ["fc_dataset_from_json", "fc_detect", "fc_session_apply", "FC_STATUS_CONFLICT", "typedef struct FcSession FcSession"] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping the compile check");
        return;
    };
    let tmp = std::env::temp_dir().join(format!("flowcomm_header_{}.c", std::process::id()));
    std::fs::write(
        &tmp,
        "#include \"flowcomm.h\"\nint main(void) { FcDataset *d = 0; FcStatus s = fc_synth_bundles(2, 6, 20, 100.0, 0.1, 0, &d); (void)s; fc_dataset_free(d); return 0; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(&tmp)
        .status()
        .unwrap();
    let _ = std::fs::remove_file(&tmp);
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
