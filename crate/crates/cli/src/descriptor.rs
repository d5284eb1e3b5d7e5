//! JSON code descriptors and the provenance block written into every output.

use std::path::Path;

use amc::complex::amc_build;
use amc::css::{css_extract, CssCode};
use amc::group::{AbelianGroup, GroupAlgebraElement};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(args: &[String], seed: u64) -> Self {
        Self { tool: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into(), command: args.join(" "), seed }
    }

    /// `#` comment lines for text and CSV outputs.
    pub fn header(&self) -> String {
        format!("# {} {}\n# command: {}\n# seed: {}\n", self.tool, self.version, self.command, self.seed)
    }
}

/// An AMC code as group, elements and chain level, with the resulting
/// check matrices as row supports for consumers outside this tool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub group: String,
    pub elements: Vec<String>,
    pub level: usize,
    pub n: usize,
    pub k: usize,
    pub hx: Vec<Vec<usize>>,
    pub hz: Vec<Vec<usize>>,
}

pub struct LoadedCode {
    pub group: AbelianGroup,
    pub elements: Vec<GroupAlgebraElement>,
    pub level: usize,
    pub code: CssCode,
}

pub fn parse_elements(group: &AbelianGroup, elems: &[String]) -> Result<Vec<GroupAlgebraElement>> {
    elems.iter().map(|e| GroupAlgebraElement::parse(group, e).with_context(|| format!("element `{e}`"))).collect()
}

impl CodeDescriptor {
    pub fn build(group: &str, elements: &[String], level: usize) -> Result<(Self, LoadedCode)> {
        let g = AbelianGroup::parse(group)?;
        let els = parse_elements(&g, elements)?;
        let code = css_extract(&amc_build(&g, &els)?, level, false)?;
        let rows = |m: &amc::gf2::BitMatrix| (0..m.rows()).map(|r| m.row_support(r)).collect();
        let desc = Self {
            provenance: None,
            group: g.to_string(),
            elements: els.iter().map(ToString::to_string).collect(),
            level,
            n: code.n,
            k: code.k,
            hx: rows(&code.hx),
            hz: rows(&code.hz),
        };
        Ok((desc, LoadedCode { group: g, elements: els, level, code }))
    }

    /// Reads a descriptor and rebuilds its code, checking `n` and `k`.
    pub fn load(path: &Path) -> Result<(Self, LoadedCode)> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let stored: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let (mut built, loaded) = Self::build(&stored.group, &stored.elements, stored.level)?;
        if (built.n, built.k) != (stored.n, stored.k) {
            bail!("{}: stored n={}, k={} but the elements give n={}, k={}", path.display(), stored.n, stored.k, built.n, built.k);
        }
        built.provenance = stored.provenance;
        Ok((built, loaded))
    }

    /// `C7[[42,6]]`-style label.
    pub fn label(&self) -> String {
        format!("{}[[{},{}]]", self.group, self.n, self.k)
    }
}
