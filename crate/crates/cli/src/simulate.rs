use crate::common::{load_model, CliError};
use crate::SimulateArgs;

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let model = load_model(args.model.as_deref())?;
    let points = model.sample(args.n, args.seed)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&args.out, points.to_csv())?;
    Ok(())
}
