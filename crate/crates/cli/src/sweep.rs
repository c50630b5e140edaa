use actspace_core::{analyze_points, AnalysisParams};

use crate::common::{
    check_bandwidth, check_step, display_path, ensure_dir, load_points, parse_bbox,
    parse_connectivity, write_manifest, CliError, Manifest,
};
use crate::SweepArgs;

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    if args.bandwidth.len() < 2 {
        return Err(CliError::usage(
            "--bandwidth needs at least two comma-separated values for a sweep",
        ));
    }
    for &h in &args.bandwidth {
        check_bandwidth(h)?;
    }
    if let Some(cell) = args.cell_size {
        if !cell.is_finite() || cell <= 0.0 {
            return Err(CliError::usage(format!(
                "--cell-size must be positive, got {cell}"
            )));
        }
    }
    let step = check_step(args.step)?;
    let connectivity = parse_connectivity(args.connectivity)?;
    let bbox = args.bbox.as_deref().map(parse_bbox).transpose()?;

    let sets = load_points(&args.input, bbox)?;
    if sets.len() > 1 {
        return Err(CliError::data(
            "sweep expects a single device; analyze each device separately",
        ));
    }
    let points = &sets[0].points;

    ensure_dir(&args.out)?;
    let mut outputs = Vec::new();
    let mut summary = String::from("bandwidth,betti_max\n");
    for &h in &args.bandwidth {
        let params = AnalysisParams::new(h)
            .with_cell_size(args.cell_size.unwrap_or(h / 4.0))
            .with_connectivity(connectivity)
            .with_level_step(step);
        let analysis = analyze_points(points, &params)?;
        let name = format!("rank_field_h{h}.asc");
        std::fs::write(args.out.join(&name), analysis.rank.field().to_esri_ascii())?;
        outputs.push(name);
        let betti_max = analysis
            .betti
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        summary.push_str(&format!("{h},{betti_max}\n"));
    }
    std::fs::write(args.out.join("sweep_summary.csv"), summary)?;
    outputs.push("sweep_summary.csv".into());

    write_manifest(
        &args.out,
        &Manifest {
            command: "sweep",
            input: Some(display_path(&args.input)),
            model: None,
            n: None,
            reps: None,
            seed: args.seed,
            bandwidths: args.bandwidth.clone(),
            cell_size: args.cell_size,
            connectivity: args.connectivity,
            level_step: Some(step),
            gammas: Vec::new(),
            bbox: bbox.map(|b| [b.xmin(), b.ymin(), b.xmax(), b.ymax()]),
            outputs,
        },
    )
}
