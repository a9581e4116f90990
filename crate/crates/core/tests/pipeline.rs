use std::path::Path;

use firescope_core::dataset::tile_raster;
use firescope_core::evaluation::{run_evaluation, EvalConfig};
use firescope_core::io::{
    emit_report, load_manifest, load_raster, parse_report, save_mask, save_raster, write_atomic, EvalManifest,
    ReportFormat, TileRecord, TileRole,
};
use firescope_core::quintile::fit_quintile;
use firescope_core::raster::RasterMeta;
use firescope_core::{BinaryMask, Raster};
use firescope_testkit as tk;

fn record(id: &str, role: TileRole) -> TileRecord {
    TileRecord {
        tile_id: id.into(),
        role,
        prediction_path: format!("{id}.pred.fsr").into(),
        target_path: (role == TileRole::IdTest).then(|| format!("{id}.target.fsr").into()),
        mask_path: (role == TileRole::OodEvent).then(|| format!("{id}.mask.fsr").into()),
        climate_path: None,
        year: 2022,
        country: None,
        oracle_label: None,
    }
}

fn f32_exact(v: f64) -> f64 {
    f64::from(v as f32)
}

#[test]
fn tile_normalize_evaluate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path();
    let mut rng = tk::rng(2024);

    // A raw parent scene is tiled, rank-normalized and perturbed into predictions.
    let parent = Raster::new(72, 48, tk::uniform(&mut rng, 72 * 48, 0.0, 40.0))
        .unwrap()
        .with_meta(RasterMeta {
            tile_id: "scene".into(),
            ..Default::default()
        });
    let transform = fit_quintile(parent.values()).unwrap();
    let tiles = tile_raster(&parent, 24).unwrap();
    assert_eq!(tiles.len(), 6);

    let mut entries = Vec::new();
    for (i, (geom, tile)) in tiles.iter().enumerate() {
        let id = geom.tile_id();
        let target = transform.apply(tile).map(f32_exact);
        let noise = tk::uniform(&mut rng, target.len(), -0.05, 0.05);
        let mut k = 0;
        let pred = target.map(|v| {
            k += 1;
            f32_exact((v + noise[k - 1]).clamp(0.0, 1.0))
        });
        let role = match i % 3 {
            0 => TileRole::IdTest,
            1 => TileRole::OodEvent,
            _ => TileRole::OodControl,
        };
        let rec = record(&id, role);
        save_raster(&pred, &base.join(&rec.prediction_path)).unwrap();
        if let Some(p) = &rec.target_path {
            save_raster(&target, &base.join(p)).unwrap();
        }
        if let Some(p) = &rec.mask_path {
            let mask = BinaryMask::from_raster(&target.map(|v| if v > 0.8 { 1.0 } else { 0.0 }));
            save_mask(&mask, &id, &base.join(p)).unwrap();
        }
        entries.push(rec);
    }
    let manifest_path = base.join("manifest.json");
    write_atomic(&manifest_path, EvalManifest::new(entries).to_json().as_bytes()).unwrap();

    let manifest = load_manifest(&manifest_path).unwrap();
    let report = run_evaluation(&manifest, &EvalConfig::default()).unwrap();
    let id = report.id_block.unwrap();
    assert!(id.mse > 0.0 && id.mse < 0.05 * 0.05);
    assert!(id.ssim > 0.5 && id.ssim < 1.0);
    assert!(report.ood_event_block.is_some() && report.ood_pixel_block.is_some());
    assert_eq!(report.provenance.counts.id_tiles, 2);
    assert_eq!(report.provenance.counts.event_tiles, 2);
    assert_eq!(report.provenance.counts.control_tiles, 2);

    let text = emit_report(&report, ReportFormat::Json);
    assert_eq!(parse_report(&text).unwrap(), report);
}

#[test]
fn saved_tiles_keep_ids_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let parent = Raster::from_fn(10, 10, |r, c| f32_exact((r * 10 + c) as f64 / 7.0))
        .unwrap()
        .with_meta(RasterMeta {
            tile_id: "p".into(),
            lat: Some(45.5),
            lon: Some(-120.25),
        });
    for (geom, tile) in tile_raster(&parent, 5).unwrap() {
        let path = dir.path().join(format!("{}.fsr", geom.tile_id()));
        save_raster(&tile, &path).unwrap();
        let back = load_raster(Path::new(&path)).unwrap();
        assert_eq!(back, tile);
        assert_eq!(back.meta().tile_id, geom.tile_id());
    }
}
