//! Argument parsing helpers and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use abreu::series::OriginBehavior;

/// Writes `content` to `path` through a sibling temporary file and a rename,
/// so an interrupted run never leaves a half-written artifact at the final
/// path.
pub fn atomic_write(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    let mut tmp = PathBuf::from(path);
    tmp.set_file_name(name);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(content.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Parses a grid range `lo:hi:steps` into the inclusive linspace it denotes.
/// A single step collapses the range to `lo`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(format!("range '{spec}' must have the form lo:hi:steps"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("range '{spec}': bad lower bound '{lo}'"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("range '{spec}': bad upper bound '{hi}'"))?;
    let steps: usize =
        steps.parse().map_err(|_| format!("range '{spec}': bad step count '{steps}'"))?;
    if steps == 0 {
        return Err(format!("range '{spec}': step count must be >= 1"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect())
}

/// Parses an origin-behaviour spec: `regular-a:f0=1,a=2`, `regular-b:f0=1`,
/// `vanishing`, or `exact-pole`.
pub fn parse_seed_origin(spec: &str) -> Result<OriginBehavior, String> {
    let (tag, rest) = match spec.split_once(':') {
        Some((tag, rest)) => (tag, rest),
        None => (spec, ""),
    };
    let fields = parse_fields(rest)?;
    let take = |key: &str| -> Result<f64, String> {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| format!("seed spec '{spec}' is missing '{key}'"))
    };
    let expect_keys = |allowed: &[&str]| -> Result<(), String> {
        for (k, _) in &fields {
            if !allowed.contains(&k.as_str()) {
                return Err(format!("seed spec '{spec}' has unknown field '{k}'"));
            }
        }
        Ok(())
    };
    match tag {
        "regular-a" => {
            expect_keys(&["f0", "a"])?;
            Ok(OriginBehavior::RegularA { f0: take("f0")?, a: take("a")? })
        }
        "regular-b" => {
            expect_keys(&["f0"])?;
            Ok(OriginBehavior::RegularB { f0: take("f0")? })
        }
        "vanishing" => {
            expect_keys(&[])?;
            Ok(OriginBehavior::Vanishing)
        }
        "exact-pole" => {
            expect_keys(&[])?;
            Ok(OriginBehavior::ExactPole)
        }
        other => Err(format!(
            "unknown origin behaviour '{other}'; expected regular-a, regular-b, vanishing, \
             or exact-pole"
        )),
    }
}

fn parse_fields(rest: &str) -> Result<Vec<(String, f64)>, String> {
    if rest.is_empty() {
        return Ok(Vec::new());
    }
    rest.split(',')
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| format!("field '{pair}' must have the form key=value"))?;
            let v: f64 = v.parse().map_err(|_| format!("field '{pair}': bad number '{v}'"))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

/// Parses cuboid bounds `a1,b1,a2,b2,...` into per-axis intervals.
pub fn parse_box(spec: &str) -> Result<Vec<(f64, f64)>, String> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|v| v.parse().map_err(|_| format!("box '{spec}': bad number '{v}'")))
        .collect::<Result<_, String>>()?;
    if values.is_empty() || !values.len().is_multiple_of(2) {
        return Err(format!("box '{spec}' needs an even number of bounds (a1,b1,a2,b2,...)"));
    }
    let bounds: Vec<(f64, f64)> = values.chunks(2).map(|c| (c[0], c[1])).collect();
    for &(a, b) in &bounds {
        if !(a < b) {
            return Err(format!("box '{spec}': bound pair ({a}, {b}) is not increasing"));
        }
    }
    Ok(bounds)
}

/// One trajectory row in the CSV schema. Display formatting round-trips
/// doubles bit-exactly, which the sidecar schema relies on.
pub fn csv_row(r: f64, f: f64, fp: f64) -> String {
    format!("{r},{f},{fp}")
}
