use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use potnet::comparison::ConductancePair;
use potnet::families::Family;
use potnet::io::{NetworkFile, PairFile, ParseError};
use potnet::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Path,
    Cycle,
    Complete,
    BinaryTree,
    HorizontalTree,
    Geometric,
}

/// Family flags shared by every command that builds a network.
#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Built-in family
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Size: edges of a path, vertices of a cycle or complete graph, truncation of the geometric integers
    #[arg(long)]
    pub n: Option<usize>,
    /// Depth of a tree family
    #[arg(long)]
    pub depth: Option<usize>,
    /// Base of the geometric integers
    #[arg(long)]
    pub base: Option<f64>,
    /// Horizontal level weights, comma separated; a single value is used for every level
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct NetworkSource {
    /// Network file (JSON)
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PairSource {
    /// Pair file (JSON) with `b_edges` and `c_edges`
    #[arg(long, conflicts_with = "family")]
    pub pair: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Base of the smaller conductance for a geometric pair
    #[arg(long)]
    pub b_base: Option<f64>,
    /// Base of the larger conductance for a geometric pair
    #[arg(long)]
    pub c_base: Option<f64>,
    /// Scalar pair `b = alpha * c` over any other family
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl FamilyArgs {
    pub fn build(&self) -> Result<Option<Family>> {
        let Some(kind) = self.family else {
            return Ok(None);
        };
        let n = || {
            self.n
                .with_context(|| format!("--family {kind:?} needs --n"))
        };
        let depth = || {
            self.depth
                .with_context(|| format!("--family {kind:?} needs --depth"))
        };
        let family = match kind {
            FamilyKind::Path => Family::Path { n: n()? },
            FamilyKind::Cycle => Family::Cycle { n: n()? },
            FamilyKind::Complete => Family::Complete { n: n()? },
            FamilyKind::BinaryTree => Family::BinaryTree { depth: depth()? },
            FamilyKind::HorizontalTree => {
                let depth = depth()?;
                let level_weights = match self.levels.as_slice() {
                    [] => vec![1.0; depth],
                    [w] => vec![*w; depth],
                    ws => ws.to_vec(),
                };
                Family::HorizontallyConnectedTree {
                    depth,
                    level_weights,
                }
            }
            FamilyKind::Geometric => Family::GeometricIntegers {
                n: n()?,
                base: self.base.context("--family geometric needs --base")?,
            },
        };
        family.check()?;
        Ok(Some(family))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_context(path: &Path) -> impl Fn(ParseError) -> anyhow::Error + '_ {
    move |e| anyhow::anyhow!("{}: {e}", path.display())
}

impl NetworkSource {
    pub fn load(&self) -> Result<Network> {
        match (&self.input, self.family.build()?) {
            (Some(path), None) => {
                let file = NetworkFile::parse(&read(path)?).map_err(parse_context(path))?;
                file.to_network().map_err(parse_context(path))
            }
            (None, Some(family)) => Ok(family.generate()?),
            (None, None) => bail!("give either --input FILE or --family"),
            (Some(_), Some(_)) => bail!("--input and --family are mutually exclusive"),
        }
    }
}

/// A loaded pair, with the geometric parameters when it came from the family.
pub struct LoadedPair {
    pub pair: ConductancePair,
    pub geometric: Option<(usize, f64, f64)>,
}

impl PairSource {
    pub fn load(&self) -> Result<LoadedPair> {
        if let Some(path) = &self.pair {
            let file = PairFile::parse(&read(path)?).map_err(parse_context(path))?;
            return Ok(LoadedPair {
                pair: file.to_pair().map_err(parse_context(path))?,
                geometric: None,
            });
        }
        match (self.family.family, self.b_base, self.c_base, self.alpha) {
            (Some(FamilyKind::Geometric), Some(b), Some(c), None) => {
                let n = self.family.n.context("--family geometric needs --n")?;
                Ok(LoadedPair {
                    pair: ConductancePair::geometric(n, b, c)?,
                    geometric: Some((n, b, c)),
                })
            }
            (Some(_), None, None, Some(alpha)) => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    bail!("--alpha must be positive, got {alpha}");
                }
                let c = self.family.build()?.expect("family present").generate()?;
                Ok(LoadedPair {
                    pair: ConductancePair::scalar(c, alpha),
                    geometric: None,
                })
            }
            (None, ..) => bail!("give either --pair FILE or --family with pair parameters"),
            _ => bail!(
                "use --b-base and --c-base with --family geometric, or --alpha with any family"
            ),
        }
    }
}
