use std::path::Path;

use actspace_core::{analyze_points, level_set, pairs_to_csv, ActivityAnalysis, AnalysisParams};

use crate::common::{
    check_bandwidth, check_cell_size, check_gammas, check_step, display_path, ensure_dir,
    load_points, parse_bbox, parse_connectivity, sanitize, write_manifest, CliError, Manifest,
};
use crate::AnalyzeArgs;

pub fn run(args: &AnalyzeArgs) -> Result<(), CliError> {
    let bandwidth = check_bandwidth(args.bandwidth)?;
    let cell_size = check_cell_size(bandwidth, args.cell_size)?;
    let step = check_step(args.step)?;
    let connectivity = parse_connectivity(args.connectivity)?;
    let gammas = args.gamma.clone().unwrap_or_else(|| vec![0.2, 0.5, 0.8]);
    check_gammas(&gammas)?;
    let bbox = args.bbox.as_deref().map(parse_bbox).transpose()?;

    let params = AnalysisParams::new(bandwidth)
        .with_cell_size(cell_size)
        .with_connectivity(connectivity)
        .with_level_step(step);

    let sets = load_points(&args.input, bbox)?;
    ensure_dir(&args.out)?;

    let multi = sets.len() > 1;
    let mut outputs = Vec::new();
    for set in &sets {
        let (dir, prefix) = match (&set.device, multi) {
            (Some(device), true) => {
                let sub = sanitize(device);
                let dir = args.out.join(&sub);
                ensure_dir(&dir)?;
                (dir, format!("{sub}/"))
            }
            _ => (args.out.clone(), String::new()),
        };
        let analysis = analyze_points(&set.points, &params)?;
        let written = write_artifacts(&dir, &analysis, &gammas)?;
        outputs.extend(written.into_iter().map(|name| format!("{prefix}{name}")));
    }

    write_manifest(
        &args.out,
        &Manifest {
            command: "analyze",
            input: Some(display_path(&args.input)),
            model: None,
            n: None,
            reps: None,
            seed: args.seed,
            bandwidths: vec![bandwidth],
            cell_size: Some(cell_size),
            connectivity: args.connectivity,
            level_step: Some(step),
            gammas,
            bbox: bbox.map(|b| [b.xmin(), b.ymin(), b.xmax(), b.ymax()]),
            outputs,
        },
    )
}

/// Mass-volume CSV with the log-volume convenience column; the stored curve
/// itself is never transformed.
fn mass_volume_csv(analysis: &ActivityAnalysis) -> String {
    let mut out = String::from("level,value,log_volume\n");
    for (l, v) in analysis
        .mass_volume
        .levels()
        .iter()
        .zip(analysis.mass_volume.values())
    {
        let log_v = if *v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
        if log_v.is_finite() {
            out.push_str(&format!("{l:.6},{v:.6},{log_v:.6}\n"));
        } else {
            out.push_str(&format!("{l:.6},{v:.6},\n"));
        }
    }
    out
}

fn write_artifacts(
    dir: &Path,
    analysis: &ActivityAnalysis,
    gammas: &[f64],
) -> Result<Vec<String>, CliError> {
    let mut outputs = Vec::new();
    let mut write = |name: String, content: String| -> Result<(), CliError> {
        std::fs::write(dir.join(&name), content)?;
        outputs.push(name);
        Ok(())
    };

    write(
        "rank_field.asc".into(),
        analysis.rank.field().to_esri_ascii(),
    )?;
    write("mass_volume.csv".into(), mass_volume_csv(analysis))?;
    write("betti.csv".into(), analysis.betti.to_csv())?;
    write("persistence.csv".into(), analysis.persistence.to_csv())?;
    write(
        "persistence_pairs.csv".into(),
        pairs_to_csv(&analysis.pairs),
    )?;
    for &gamma in gammas {
        let cells = level_set(&analysis.rank, gamma)?;
        write(
            format!("level_set_{gamma:.3}.asc"),
            cells.to_mask_field().to_esri_ascii(),
        )?;
    }
    Ok(outputs)
}
