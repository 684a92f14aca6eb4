use std::io::Write;
use std::path::{Path, PathBuf};

use fractaldim::catalog::{self, IntervalSet, Polyline, Triangle};
use fractaldim::estimator::{self, GridSpec, ScaleEntry};
use fractaldim::ifs::{self, ContractionSystem, DEFAULT_POINT_BUDGET};
use fractaldim::io::{self as fio, SvgStyle};
use fractaldim::osc::{self, ConvexRegion, OscReport};
use fractaldim::{moran, DimensionFit, PointCloud};
use serde::Serialize;

use crate::{DimArgs, GenArgs, Method, OscArgs, OutFormat, Preset, PresetArgs, ProfileArgs};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const BUDGET_ENV: &str = "FRACTALDIM_BUDGET";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<fractaldim::Error> for CliError {
    fn from(e: fractaldim::Error) -> Self {
        CliError { code: if e.is_numeric() { EXIT_NUMERIC } else { EXIT_INPUT }, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|()| out.flush()).map_err(|e| CliError::input(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn budget() -> CliResult<u64> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::input(format!("{BUDGET_ENV}={v:?} is not a point count"))),
        Err(_) => Ok(DEFAULT_POINT_BUDGET),
    }
}

fn preset_name(p: Preset) -> &'static str {
    match p {
        Preset::Cantor => "cantor",
        Preset::Koch => "koch",
        Preset::Snowflake => "snowflake",
        Preset::Sierpinski => "sierpinski",
        Preset::Hilbert => "hilbert",
    }
}

fn preset_system(p: Preset) -> CliResult<ContractionSystem> {
    match p {
        Preset::Cantor => Ok(catalog::cantor_ifs()),
        Preset::Koch => Ok(catalog::koch_ifs()),
        Preset::Sierpinski => Ok(catalog::sierpinski_ifs()),
        Preset::Snowflake | Preset::Hilbert => {
            Err(CliError::input(format!("preset {} has no IFS; use --method level", preset_name(p))))
        }
    }
}

fn preset_region(p: Preset) -> CliResult<ConvexRegion> {
    match p {
        Preset::Cantor => Ok(catalog::cantor_region()),
        Preset::Koch => Ok(catalog::koch_region()),
        Preset::Sierpinski => Ok(catalog::sierpinski_region()),
        Preset::Snowflake | Preset::Hilbert => {
            Err(CliError::input(format!("preset {} has no open set", preset_name(p))))
        }
    }
}

fn load_system(path: &Path) -> CliResult<ContractionSystem> {
    ContractionSystem::from_json(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_region(path: &Path) -> CliResult<ConvexRegion> {
    ConvexRegion::from_json(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_cloud(path: &Path) -> CliResult<PointCloud> {
    fio::read_cloud_csv(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn parse_levels(s: &str) -> CliResult<(i32, i32)> {
    let bad = || CliError::input(format!("levels must look like kmin:kmax, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_deltas(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::input(format!("deltas must look like lo:hi:n, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || (n > 1 && hi <= lo) {
        return Err(bad());
    }
    Ok(estimator::linspace(lo, hi, n))
}

fn parse_origin(s: Option<&str>) -> CliResult<Option<Vec<f64>>> {
    s.map(|s| {
        s.split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| CliError::input(format!("bad origin coordinate {c:?}"))))
            .collect()
    })
    .transpose()
}

fn grid_spec(base: f64, levels: (i32, i32), origin: Option<&str>) -> CliResult<GridSpec> {
    let mut grid = GridSpec::new(base, levels.0, levels.1)?;
    if let Some(o) = parse_origin(origin)? {
        grid = grid.with_origin(o)?;
    }
    Ok(grid)
}

enum Artifact {
    Cloud(PointCloud),
    Intervals(IntervalSet),
    Line(Polyline),
    Triangles(Vec<Triangle>),
}

fn level_artifact(preset: Preset, depth: u32, budget: u64) -> CliResult<Artifact> {
    Ok(match preset {
        Preset::Cantor => Artifact::Intervals(catalog::cantor_level(depth, budget)?),
        Preset::Koch => Artifact::Line(catalog::koch_level(depth, budget)?),
        Preset::Snowflake => Artifact::Line(catalog::snowflake_level(depth, budget)?),
        Preset::Sierpinski => Artifact::Triangles(catalog::sierpinski_level(depth, budget)?),
        Preset::Hilbert => Artifact::Line(catalog::hilbert_curve(depth)?),
    })
}

fn artifact_csv(a: &Artifact) -> String {
    match a {
        Artifact::Cloud(c) => fio::write_cloud_csv(c),
        Artifact::Intervals(s) => fio::write_cloud_csv(&s.midpoints()),
        Artifact::Line(l) => fio::write_cloud_csv(&l.to_cloud()),
        Artifact::Triangles(t) => {
            let centroids: Vec<[f64; 2]> = t
                .iter()
                .map(|[a, b, c]| [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0])
                .collect();
            fio::write_cloud_csv(&PointCloud::from_points(2, &centroids).expect("finite centroids"))
        }
    }
}

fn artifact_svg(a: &Artifact, style: &SvgStyle) -> String {
    match a {
        Artifact::Cloud(c) => fio::points_svg(c, style),
        Artifact::Intervals(s) => fio::intervals_svg(s.intervals(), style),
        Artifact::Line(l) => fio::polyline_svg(&[l], style),
        Artifact::Triangles(t) => fio::triangles_svg(t, style),
    }
}

pub fn gen(args: &GenArgs) -> CliResult<()> {
    let budget = budget()?;
    let system = match (args.preset, &args.ifs) {
        (Some(p), _) => preset_system(p).ok(),
        (None, Some(path)) => Some(load_system(path)?),
        (None, None) => return Err(CliError::input("either an IFS file or --preset is required")),
    };
    if args.out == OutFormat::Json {
        let system = match (&system, args.preset) {
            (Some(s), _) => s,
            (None, Some(p)) => return Err(preset_system(p).unwrap_err()),
            (None, None) => unreachable!("file input always yields a system"),
        };
        return emit(args.output.as_ref(), &format!("{}\n", system.to_json()));
    }
    let method = args.method.unwrap_or(if system.is_some() { Method::Det } else { Method::Level });
    let artifact = match method {
        Method::Det | Method::Chaos => {
            let system = match (&system, args.preset) {
                (Some(s), _) => s,
                (None, Some(p)) => return Err(preset_system(p).unwrap_err()),
                (None, None) => unreachable!("file input always yields a system"),
            };
            let sample = if method == Method::Det {
                ifs::deterministic_attractor(system, args.depth, budget)?
            } else {
                if args.count as u128 > u128::from(budget) {
                    return Err(fractaldim::Error::BudgetExceeded { requested: args.count as u128, budget }.into());
                }
                ifs::chaos_game(system, args.count, args.seed, args.burn_in)?
            };
            Artifact::Cloud(sample.cloud)
        }
        Method::Level => {
            let preset = args.preset.ok_or_else(|| CliError::input("--method level needs --preset"))?;
            level_artifact(preset, args.depth, budget)?
        }
    };
    let text = match args.out {
        OutFormat::Csv => artifact_csv(&artifact),
        OutFormat::Svg => {
            let style = SvgStyle {
                size_px: args.size,
                stroke: args.stroke.clone(),
                stroke_width_px: args.stroke_width,
                ..SvgStyle::default()
            };
            artifact_svg(&artifact, &style)
        }
        OutFormat::Json => unreachable!("handled above"),
    };
    emit(args.output.as_ref(), &text)
}

#[derive(Debug, Serialize)]
struct MoranReport {
    mode: &'static str,
    dimension: f64,
    residual: f64,
    ratios: Vec<f64>,
    osc_verified: bool,
    note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    osc: Option<OscReport>,
}

#[derive(Debug, Serialize)]
struct BoxCountReport {
    mode: &'static str,
    points: usize,
    series: Vec<ScaleEntry>,
    fitted_levels: [i32; 2],
    fit: DimensionFit,
}

pub fn dim(args: &DimArgs) -> CliResult<()> {
    if let Some(path) = &args.boxcount {
        let cloud = load_cloud(path)?;
        let grid = grid_spec(args.grid.base, parse_levels(&args.grid.levels)?, args.grid.origin.as_deref())?;
        let result = estimator::box_dimension(&cloud, &grid)?;
        if let Some(out) = &args.series_csv {
            emit(Some(out), &fio::write_series_csv(&result.series))?;
        }
        let report = BoxCountReport {
            mode: "boxcount",
            points: cloud.len(),
            series: result.series.entries,
            fitted_levels: [*result.fitted_levels.start(), *result.fitted_levels.end()],
            fit: result.fit,
        };
        return emit(None, &to_json(&report));
    }

    let (system, default_region) = match (&args.moran, args.preset) {
        (Some(path), _) => (load_system(path)?, None),
        (None, Some(p)) => (preset_system(p)?, None),
        (None, None) => return Err(CliError::input("one of --moran, --preset or --boxcount is required")),
    };
    let region: Option<ConvexRegion> = match &args.region {
        Some(path) => Some(load_region(path)?),
        None => default_region,
    };
    let scales = system.scale_list();
    let d = moran::moran_dimension(&scales);
    let residual = (moran::moran_value(&scales, d) - 1.0).abs();
    let osc = region.map(|r| osc::check_osc(&system, &r)).transpose()?;
    let verified = osc.as_ref().is_some_and(OscReport::passed);
    let note = match &osc {
        None => "upper bound unless OSC holds".to_string(),
        Some(r) if r.passed() => "OSC verified: similarity dimension equals the Hausdorff dimension".to_string(),
        Some(_) => "upper bound only: OSC check failed for the given region".to_string(),
    };
    let report = MoranReport {
        mode: "moran",
        dimension: d,
        residual,
        ratios: scales.ratios().to_vec(),
        osc_verified: verified,
        note,
        osc,
    };
    emit(None, &to_json(&report))
}

#[derive(Debug, Serialize)]
struct ProfileReport {
    epsilon: f64,
    occupied_cells: usize,
    cell_diameter: f64,
    crossover: f64,
    profile: Vec<ProfilePoint>,
}

#[derive(Debug, Serialize)]
struct ProfilePoint {
    delta: f64,
    value: f64,
}

pub fn profile(args: &ProfileArgs) -> CliResult<()> {
    let cloud = load_cloud(&args.cloud)?;
    let deltas = match &args.deltas {
        Some(s) => parse_deltas(s)?,
        None => estimator::default_deltas(cloud.dim()),
    };
    let grid = grid_spec(args.base, (0, 0), args.origin.as_deref())?;
    let profile = estimator::measure_profile(&cloud, args.epsilon, &deltas, &grid)?;
    if let Some(path) = &args.csv {
        emit(Some(path), &fio::write_profile_csv(&profile))?;
    }
    let crossover = estimator::crossover_dimension(&profile)?;
    let report = ProfileReport {
        epsilon: profile.epsilon,
        occupied_cells: estimator::grid_count(&cloud, args.epsilon, &grid)?.count,
        cell_diameter: estimator::cell_diameter(args.epsilon, cloud.dim()),
        crossover,
        profile: profile.deltas.iter().zip(&profile.values).map(|(&delta, &value)| ProfilePoint { delta, value }).collect(),
    };
    emit(None, &to_json(&report))
}

#[derive(Debug, Serialize)]
struct OscOutput {
    #[serde(flatten)]
    report: OscReport,
    similarity_dimension: f64,
    dimension_status: &'static str,
}

pub fn osc(args: &OscArgs) -> CliResult<()> {
    let (system, region) = match (args.preset, args.files.as_slice()) {
        (Some(p), []) => (preset_system(p)?, preset_region(p)?),
        (Some(p), [region]) => (preset_system(p)?, load_region(region)?),
        (None, [ifs, region]) => (load_system(ifs)?, load_region(region)?),
        (Some(_), _) => return Err(CliError::input("with --preset give at most one REGION file")),
        (None, _) => return Err(CliError::input("expected IFS and REGION files")),
    };
    let report = osc::check_osc(&system, &region)?;
    let output = OscOutput {
        dimension_status: if report.passed() { "hausdorff_dimension" } else { "upper_bound_only" },
        similarity_dimension: system.similarity_dimension(),
        report,
    };
    emit(None, &to_json(&output))
}

pub fn preset(args: &PresetArgs) -> CliResult<()> {
    let text = if args.region { preset_region(args.name)?.to_json() } else { preset_system(args.name)?.to_json() };
    emit(None, &format!("{text}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_and_delta_parsing() {
        assert_eq!(parse_levels("1:8").unwrap(), (1, 8));
        assert_eq!(parse_levels("-2:3").unwrap(), (-2, 3));
        assert!(parse_levels("1-8").is_err());
        let d = parse_deltas("0.5:1.5:3").unwrap();
        assert_eq!(d, vec![0.5, 1.0, 1.5]);
        assert!(parse_deltas("1:0:3").is_err());
        assert!(parse_deltas("1:2").is_err());
    }

    #[test]
    fn origin_parsing() {
        assert_eq!(parse_origin(Some("0.5, -1")).unwrap(), Some(vec![0.5, -1.0]));
        assert_eq!(parse_origin(None).unwrap(), None);
        assert!(parse_origin(Some("a,b")).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(fractaldim::Error::NoCrossing).code, EXIT_NUMERIC);
        assert_eq!(CliError::from(fractaldim::Error::EmptyCloud).code, EXIT_INPUT);
    }
}
