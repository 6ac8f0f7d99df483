//! The `--gen` mini-language.
//!
//! ```text
//! spec    := family [":" params]
//! params  := key "=" value ("," key "=" value)*
//! family  := random | hard-single | hard-multi | dominant | fig2
//! ```
//!
//! * `random:n=2,L=2,A=2,K=6,dist=independent,seed=7` (`dist` is `general`
//!   or `independent`, default `general`; `seed` defaults to 0)
//! * `hard-single:c=1,eps=0.2,sigma=+` (`sigma` is one `+`/`-` per pair,
//!   default all `+`)
//! * `hard-multi:n=2,K=2,eps=0.2,sigma=+-` (class-C base over `nK` types,
//!   `sigma` has `nK/2` signs)
//! * `dominant:n=1,L=2,A=2,K=2,seed=0`
//! * `fig2`: the benchmark preset, two followers with six independent types
//!   and two actions against two leader actions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::GameInstance;
use crate::harness::generators::{
    gen_class_c, gen_dominant_instance, gen_multi_follower_hard, gen_random_instance, gen_single_follower_hard,
    parse_sigma, DistKind,
};

/// Seed of the `fig2` preset.
pub const FIG2_SEED: u64 = 2;
pub const FIG2_SPEC: &str = "random:n=2,L=2,A=2,K=6,dist=independent,seed=2";

struct Params {
    family: String,
    values: BTreeMap<String, String>,
}

impl Params {
    fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (family, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut values = BTreeMap::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            if values.insert(key.trim().to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Parse(format!("duplicate key {key:?}")));
            }
        }
        Ok(Self { family: family.trim().to_string(), values })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn usize(&mut self, key: &str, default: Option<usize>) -> Result<usize> {
        match self.take(key) {
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("{key}={v} is not an integer"))),
            None => default.ok_or_else(|| Error::Parse(format!("missing {key}"))),
        }
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.take(key) {
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("{key}={v} is not an integer"))),
            None => Ok(default),
        }
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        let v = self.take(key).ok_or_else(|| Error::Parse(format!("missing {key}")))?;
        v.parse().map_err(|_| Error::Parse(format!("{key}={v} is not a number")))
    }

    fn sigma(&mut self, len: usize) -> Result<Vec<i8>> {
        match self.take("sigma") {
            Some(s) => parse_sigma(&s),
            None => Ok(vec![1; len]),
        }
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(k) => Err(Error::Parse(format!("unknown key {k:?} for {}", self.family))),
            None => Ok(()),
        }
    }
}

/// Builds the instance described by `spec`.
pub fn generate(spec: &str) -> Result<GameInstance> {
    let mut p = Params::parse(spec)?;
    let instance = match p.family.as_str() {
        "fig2" => return generate(FIG2_SPEC).and_then(|g| p.finish().map(|_| g)),
        "random" => {
            let (n, l, a, k) = (p.usize("n", None)?, p.usize("L", None)?, p.usize("A", None)?, p.usize("K", None)?);
            let kind = match p.take("dist").as_deref() {
                None | Some("general") => DistKind::General,
                Some("independent") => DistKind::Independent,
                Some(other) => return Err(Error::Parse(format!("unknown dist {other:?}"))),
            };
            let seed = p.u64("seed", 0)?;
            gen_random_instance(n, l, a, k, kind, seed)?
        }
        "hard-single" => {
            let c = p.usize("c", None)?;
            let eps = p.f64("eps")?;
            let sigma = p.sigma(c)?;
            gen_single_follower_hard(c, eps, &sigma)?
        }
        "hard-multi" => {
            let (n, k) = (p.usize("n", None)?, p.usize("K", None)?);
            if (n * k) % 2 != 0 {
                return Err(Error::Parse("hard-multi needs n*K even".into()));
            }
            let eps = p.f64("eps")?;
            let sigma = p.sigma(n * k / 2)?;
            let base = gen_class_c(n * k / 2, eps, &sigma)?;
            gen_multi_follower_hard(n, k, &base)?
        }
        "dominant" => {
            let (n, l, a, k) = (p.usize("n", Some(1))?, p.usize("L", Some(2))?, p.usize("A", Some(2))?, p.usize("K", Some(2))?);
            let seed = p.u64("seed", 0)?;
            gen_dominant_instance(n, l, a, k, seed)?
        }
        other => return Err(Error::Parse(format!("unknown generator family {other:?}"))),
    };
    p.finish()?;
    Ok(instance)
}
