//! State-source grammar.
//!
//! Sources are colon-separated prefix expressions, so `mix` can nest:
//!
//! ```text
//! bell                     two-qubit Bell pair
//! mixed:2x2x2              maximally mixed state on the given dims
//! horodecki:B              2⊗4 bound entangled state, 0 < B < 1
//! ghz:EPS                  perturbed three-qubit GHZ state
//! separable:DIMS:K         random separable state with K product terms (uses --seed)
//! file:PATH                JSON state file
//! mix:X:A:B                X·A + (1 - X)·B
//! ```

use std::path::PathBuf;

use blochsep::states::{
    bell_pair, density_from_pure, ghz_perturbed, horodecki_2x4, maximally_mixed, mix, random_separable,
    DensityMatrix,
};
use blochsep::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Bell,
    Mixed(Vec<usize>),
    Horodecki(f64),
    Ghz(f64),
    Separable { dims: Vec<usize>, terms: usize },
    File(PathBuf),
    Mix { x: f64, a: Box<Source>, b: Box<Source> },
}

fn usage<T>(msg: String) -> Result<T> {
    Err(Error::Contract(msg))
}

pub fn parse_dims(text: &str) -> Result<Vec<usize>> {
    text.split(['x', ','])
        .map(|d| d.trim().parse::<usize>().map_err(|_| Error::Contract(format!("bad dimension {d:?} in {text:?}"))))
        .collect()
}

fn parse_f64(text: &str, what: &str) -> Result<f64> {
    text.parse::<f64>().map_err(|_| Error::Contract(format!("bad {what} {text:?}")))
}

impl Source {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split(':').collect();
        let (source, used) = Self::parse_tokens(&tokens, text)?;
        if used != tokens.len() {
            return usage(format!("trailing input in state source {text:?}"));
        }
        Ok(source)
    }

    fn parse_tokens(tokens: &[&str], whole: &str) -> Result<(Self, usize)> {
        let arg = |i: usize| -> Result<&str> {
            tokens
                .get(i)
                .copied()
                .ok_or_else(|| Error::Contract(format!("state source {whole:?} ends early")))
        };
        match arg(0)? {
            "bell" => Ok((Source::Bell, 1)),
            "mixed" => Ok((Source::Mixed(parse_dims(arg(1)?)?), 2)),
            "horodecki" => Ok((Source::Horodecki(parse_f64(arg(1)?, "horodecki parameter")?), 2)),
            "ghz" => Ok((Source::Ghz(parse_f64(arg(1)?, "ghz epsilon")?), 2)),
            "separable" => {
                let dims = parse_dims(arg(1)?)?;
                let terms = arg(2)?
                    .parse::<usize>()
                    .map_err(|_| Error::Contract(format!("bad term count in {whole:?}")))?;
                Ok((Source::Separable { dims, terms }, 3))
            }
            "file" => Ok((Source::File(PathBuf::from(arg(1)?)), 2)),
            "mix" => {
                let x = parse_f64(arg(1)?, "mixing weight")?;
                let (a, used_a) = Self::parse_tokens(&tokens[2..], whole)?;
                let (b, used_b) = Self::parse_tokens(&tokens[2 + used_a..], whole)?;
                Ok((Source::Mix { x, a: Box::new(a), b: Box::new(b) }, 2 + used_a + used_b))
            }
            other => usage(format!("unknown state source {other:?}")),
        }
    }

    pub fn build(&self, seed: u64) -> Result<DensityMatrix> {
        match self {
            Source::Bell => Ok(density_from_pure(&bell_pair())),
            Source::Mixed(dims) => maximally_mixed(dims),
            Source::Horodecki(b) => horodecki_2x4(*b),
            Source::Ghz(eps) => Ok(density_from_pure(&ghz_perturbed(*eps))),
            Source::Separable { dims, terms } => random_separable(dims, *terms, seed),
            Source::File(path) => DensityMatrix::load(path),
            Source::Mix { x, a, b } => mix(*x, &a.build(seed)?, &b.build(seed)?),
        }
    }
}
