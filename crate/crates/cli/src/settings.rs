//! Effective run configuration: config file overlaid by flags, parsed once.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;

use fso_secrecy::channel::{
    unit_mean_omega, LosSpec, MalagaParams, Preset, PRESET_B0, PRESET_DELTA, PRESET_OMEGA1,
};
use fso_secrecy::secrecy::SecrecyTarget;
use fso_secrecy::{DenominatorConvention, SeriesNumerics};

use crate::args::RunArgs;
use crate::config::{parse_config, render_config};
use crate::error::{CliError, CliResult};
use crate::range::parse_range;

/// dB to linear power ratio. The only conversion site.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsUnit {
    Nats,
    Bits,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Option<MalagaParams>,
    /// Only set when the channel came from a preset alone.
    pub preset: Option<Preset>,
    pub mu1_db: Option<Vec<f64>>,
    pub mu2_db: Option<f64>,
    pub rho: Option<Vec<f64>>,
    /// As given, in `rs_unit`.
    pub rs: Option<f64>,
    pub rs_unit: RsUnit,
    pub num: SeriesNumerics,
    pub samples: Option<usize>,
    pub seed: u64,
    pub gamma1: Option<Vec<f64>>,
    pub gamma2: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub effective: BTreeMap<String, String>,
}

fn float(map: &BTreeMap<String, String>, key: &str) -> CliResult<Option<f64>> {
    map.get(key)
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::invalid(key, format!("not a finite number: {s:?}")))
        })
        .transpose()
}

fn integer<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> CliResult<Option<T>> {
    map.get(key)
        .map(|s| s.parse::<T>().map_err(|_| CliError::invalid(key, format!("not a non-negative integer: {s:?}"))))
        .transpose()
}

fn channel(map: &BTreeMap<String, String>) -> CliResult<(Option<MalagaParams>, Option<Preset>)> {
    let preset = map.get("preset").map(|s| s.parse::<Preset>()).transpose()?;
    let (alpha, beta) = match (preset.map(Preset::alpha_beta), float(map, "alpha")?, integer::<u32>(map, "beta")?) {
        (_, Some(a), Some(b)) => (a, b),
        (Some((a, b)), alpha, beta) => (alpha.unwrap_or(a), beta.unwrap_or(b)),
        (None, None, None) => return Ok((None, None)),
        (None, None, _) => return Err(CliError::invalid("alpha", "required unless --preset is given")),
        (None, _, None) => return Err(CliError::invalid("beta", "required unless --preset is given")),
    };
    let b0 = float(map, "b0")?.unwrap_or(PRESET_B0);
    let delta = float(map, "delta")?.unwrap_or(PRESET_DELTA);
    let los = match (float(map, "omega1")?, float(map, "omega_prime")?) {
        (Some(_), Some(_)) => return Err(CliError::invalid("omega1", "give either omega1 or omega_prime, not both")),
        (Some(o), None) => LosSpec::Omega1(o),
        (None, Some(op)) => LosSpec::Components {
            omega_prime: op,
            phi_a: float(map, "phi_a")?.unwrap_or(0.0),
            phi_b: float(map, "phi_b")?.unwrap_or(0.0),
        },
        (None, None) => LosSpec::Omega1(PRESET_OMEGA1),
    };
    let omega = match float(map, "omega")? {
        Some(o) => o,
        None => {
            let probe = MalagaParams::new(alpha, beta, b0, delta, 1.0, los)?;
            unit_mean_omega(b0, delta, probe.omega1())
        }
    };
    let params = MalagaParams::new(alpha, beta, b0, delta, omega, los)?;
    let pure_preset = ["alpha", "beta", "b0", "delta", "omega", "omega1", "omega_prime", "phi_a", "phi_b"]
        .iter()
        .all(|k| !map.contains_key(*k));
    Ok((Some(params), if pure_preset { preset } else { None }))
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> CliResult<Self> {
        let mut map = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        map.extend(args.flag_map());
        Self::from_map(map)
    }

    pub fn from_map(map: BTreeMap<String, String>) -> CliResult<Self> {
        let (params, preset) = channel(&map)?;
        let range = |key: &str| map.get(key).map(|s| parse_range(key, s)).transpose();
        let mu2_db = range("mu2_db")?
            .map(|v| match v.as_slice() {
                [x] => Ok(*x),
                _ => Err(CliError::invalid("mu2_db", "must be a single value")),
            })
            .transpose()?;
        let rs_unit = match map.get("rs_unit").map(String::as_str) {
            None | Some("nats") => RsUnit::Nats,
            Some("bits") => RsUnit::Bits,
            Some(other) => return Err(CliError::invalid("rs_unit", format!("expected nats or bits, got {other:?}"))),
        };
        let mut num = SeriesNumerics::default();
        if let Some(t) = integer::<usize>(&map, "t_max")? {
            num.t_max = t;
        }
        if let Some(r) = float(&map, "rel_tol")? {
            num.rel_tol = r;
        }
        if let Some(q) = integer::<usize>(&map, "quad_order")? {
            num.quad_order = q;
        }
        if let Some(d) = map.get("denominator") {
            num.denominator = d.parse::<DenominatorConvention>()?;
        }
        num.validate()?;
        let cfg = RunConfig {
            params,
            preset,
            mu1_db: range("mu1_db")?,
            mu2_db,
            rho: range("rho")?,
            rs: float(&map, "rs")?,
            rs_unit,
            num,
            samples: integer(&map, "samples")?,
            seed: integer(&map, "seed")?.unwrap_or(42),
            gamma1: range("gamma1")?,
            gamma2: range("gamma2")?,
            out: map.get("out").map(PathBuf::from),
            effective: map,
        };
        if let Some(rs) = cfg.rs {
            cfg.target_for(rs)?;
        }
        Ok(cfg)
    }

    pub fn params(&self) -> CliResult<MalagaParams> {
        self.params
            .ok_or_else(|| CliError::invalid("preset", "give --preset or --alpha and --beta"))
    }

    pub fn mu1_list(&self) -> CliResult<&[f64]> {
        self.mu1_db.as_deref().ok_or_else(|| CliError::invalid("mu1_db", "required"))
    }

    pub fn mu2(&self) -> CliResult<f64> {
        self.mu2_db.ok_or_else(|| CliError::invalid("mu2_db", "required"))
    }

    pub fn rho_list(&self) -> CliResult<&[f64]> {
        self.rho.as_deref().ok_or_else(|| CliError::invalid("rho", "required"))
    }

    pub fn single(field: &str, v: &[f64]) -> CliResult<f64> {
        match v {
            [x] => Ok(*x),
            _ => Err(CliError::invalid(field, "must be a single value for this command")),
        }
    }

    /// Target rate in `rs_unit` converted to the core's nats.
    pub fn target_for(&self, rs: f64) -> CliResult<SecrecyTarget> {
        Ok(match self.rs_unit {
            RsUnit::Nats => SecrecyTarget::new(rs)?,
            RsUnit::Bits => SecrecyTarget::from_bits(rs)?,
        })
    }

    pub fn target(&self) -> CliResult<SecrecyTarget> {
        self.target_for(self.rs.unwrap_or(0.0))
    }

    pub fn dump(&self) -> String {
        render_config(&self.effective)
    }

    /// Stable within a build: SipHash with fixed keys over the rendered config.
    pub fn hash(&self) -> String {
        let mut h = DefaultHasher::new();
        self.dump().hash(&mut h);
        format!("{:016x}", h.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn cfg(text: &str) -> CliResult<RunConfig> {
        RunConfig::from_map(parse_config(text).unwrap())
    }

    #[test]
    fn preset_with_override() {
        let c = cfg("preset = weak\nbeta = 2\n").unwrap();
        let p = c.params().unwrap();
        assert_eq!((p.alpha(), p.beta()), (8.0, 2));
        assert_eq!(c.preset, None);
        assert_eq!(cfg("preset = weak").unwrap().preset, Some(Preset::Weak));
    }

    #[test]
    fn explicit_channel_needs_alpha_and_beta() {
        assert!(matches!(cfg("alpha = 2.0"), Err(CliError::Invalid { field, .. }) if field == "beta"));
        assert!(cfg("alpha = 2.0\nbeta = 3").is_ok());
    }

    #[test]
    fn unit_mean_omega_by_default() {
        let p = cfg("preset = strong").unwrap().params().unwrap();
        assert!((p.omega() * (p.xi() + p.omega1()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bits_convert_by_ln2() {
        let c = cfg("rs = 1\nrs_unit = bits").unwrap();
        assert!((c.target().unwrap().rs() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn bad_values_name_the_field() {
        for (text, field) in [
            ("rho = x", "rho"),
            ("t_max = -1", "t_max"),
            ("rel_tol = 0.5", "rel_tol"),
            ("quad_order = 65", "quad_order"),
            ("mu2_db = 1:3:1", "mu2_db"),
            ("rs = -1", "rs"),
            ("denominator = gamma", "denominator"),
            ("preset = calm", "preset"),
        ] {
            match cfg(text) {
                Err(CliError::Invalid { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn dump_round_trips() {
        let c = cfg("preset = weak\nrho = 0.9\nmu1_db = 30:70:5\n").unwrap();
        let again = cfg(&c.dump()).unwrap();
        assert_eq!(again.dump(), c.dump());
        assert_eq!(again.hash(), c.hash());
    }
}
