use actspace_core::{run_error_benchmark, AnalysisParams, BenchConfig};

use crate::common::{
    check_bandwidth, check_cell_size, check_gammas, ensure_dir, load_model, model_label,
    parse_connectivity, write_manifest, CliError, Manifest,
};
use crate::BenchArgs;

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    if args.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    let bandwidth = check_bandwidth(args.bandwidth)?;
    let cell_size = check_cell_size(bandwidth, args.cell_size)?;
    let connectivity = parse_connectivity(args.connectivity)?;
    let gammas = args
        .gamma
        .clone()
        .unwrap_or_else(BenchConfig::standard_gammas);
    check_gammas(&gammas)?;

    let model = load_model(args.model.as_deref())?;
    let cfg = BenchConfig {
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        params: AnalysisParams::new(bandwidth)
            .with_cell_size(cell_size)
            .with_connectivity(connectivity),
        gammas: gammas.clone(),
    };
    let result = run_error_benchmark(&model, &cfg)?;

    let mut csv = String::from(
        "gamma,dr_anchors_mean,dr_anchors_se,dr_roads_mean,dr_roads_se,\
         kde_anchors_mean,kde_anchors_se,kde_roads_mean,kde_roads_se\n",
    );
    for (i, gamma) in result.gammas.iter().enumerate() {
        csv.push_str(&format!(
            "{gamma:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            result.rank_anchors[i].mean,
            result.rank_anchors[i].se,
            result.rank_roads[i].mean,
            result.rank_roads[i].se,
            result.density_anchors[i].mean,
            result.density_anchors[i].se,
            result.density_roads[i].mean,
            result.density_roads[i].se,
        ));
    }

    ensure_dir(&args.out)?;
    std::fs::write(args.out.join("bench_errors.csv"), csv)?;
    write_manifest(
        &args.out,
        &Manifest {
            command: "bench",
            input: None,
            model: Some(model_label(args.model.as_ref())),
            n: Some(args.n),
            reps: Some(args.reps),
            seed: args.seed,
            bandwidths: vec![bandwidth],
            cell_size: Some(cell_size),
            connectivity: args.connectivity,
            level_step: None,
            gammas,
            bbox: None,
            outputs: vec!["bench_errors.csv".into()],
        },
    )
}
