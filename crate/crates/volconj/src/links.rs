//! Catalogue of the supported link families, their JSJ piece profiles and
//! simplicial volumes, and the textual link-specification grammar.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! link  := "U" | "4_1" | "WL"
//!        | "W(" int "," nat "," nat ")*4_1"
//!        | "WD^" nat "(4_1)"
//!        | "W[" nat "," nat "]"
//!        | "hopf(" knot "," knot ")"
//! knot  := any link above with one component
//! ```

use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{lobachevsky, lobachevsky_hp};

/// One of the parametric link families.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkFamily {
    Unknot,
    FigureEight,
    WhiteheadLink,
    /// `W_{a,1,c,d}(4₁)`: a Whitehead chain with `a` full twists, one belt,
    /// `c` clasps and `d` mirror clasps, cabled onto the figure-eight knot.
    WhiteheadChainCabledFigEight {
        a: i64,
        c: u32,
        d: u32,
    },
    /// The `(p+1)`-fold iterated Whitehead double of the figure-eight knot.
    IteratedDoubleFigEight {
        p: u32,
    },
    /// The two-component link obtained from the Hopf link by Whitehead
    /// doubling one component `alpha` times and the other `beta` times.
    WAlphaBeta {
        alpha: u32,
        beta: u32,
    },
    /// `K₁ # W⁰₀ # K₂`: two knots summed onto the components of a Hopf link.
    HopfUnion {
        left: Box<LinkFamily>,
        right: Box<LinkFamily>,
    },
}

impl LinkFamily {
    /// Validating constructor for the cabled Whitehead chain.
    pub fn cabled_chain(a: i64, c: u32, d: u32) -> Result<Self> {
        let link = Self::WhiteheadChainCabledFigEight { a, c, d };
        link.validate()?;
        Ok(link)
    }

    /// Validating constructor for `W^α_β`.
    pub fn w_alpha_beta(alpha: u32, beta: u32) -> Result<Self> {
        let link = Self::WAlphaBeta { alpha, beta };
        link.validate()?;
        Ok(link)
    }

    /// Validating constructor for the Hopf union of two knots.
    pub fn hopf_union(left: LinkFamily, right: LinkFamily) -> Result<Self> {
        let link = Self::HopfUnion { left: Box::new(left), right: Box::new(right) };
        link.validate()?;
        Ok(link)
    }

    /// Check the family-specific parameter constraints.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::WhiteheadChainCabledFigEight { c, d, .. } if c + d == 0 => {
                Err(Error::InvalidInput("cabled chain needs c + d ≥ 1".into()))
            }
            Self::WAlphaBeta { alpha, beta } if alpha + beta == 0 => {
                Err(Error::InvalidInput("W[alpha,beta] needs alpha + beta ≥ 1".into()))
            }
            Self::HopfUnion { left, right } => {
                for k in [left, right] {
                    k.validate()?;
                    if k.components() != 1 {
                        return Err(Error::InvalidInput(format!("hopf union summands must be knots, got {k}")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of link components.
    pub fn components(&self) -> u32 {
        match self {
            Self::Unknot | Self::FigureEight | Self::IteratedDoubleFigEight { .. } => 1,
            Self::WhiteheadLink | Self::WAlphaBeta { .. } | Self::HopfUnion { .. } => 2,
            Self::WhiteheadChainCabledFigEight { c, d, .. } => 1 + c + d,
        }
    }

    /// Parse the textual specification (see the module docs).
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let link = p.link()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("end of input"));
        }
        link.validate().map_err(|_| Error::Parse { position: 0, expected: format!("valid parameters for {link}") })?;
        Ok(link)
    }
}

impl fmt::Display for LinkFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unknot => write!(f, "U"),
            Self::FigureEight => write!(f, "4_1"),
            Self::WhiteheadLink => write!(f, "WL"),
            Self::WhiteheadChainCabledFigEight { a, c, d } => write!(f, "W({a},{c},{d})*4_1"),
            Self::IteratedDoubleFigEight { p } => write!(f, "WD^{p}(4_1)"),
            Self::WAlphaBeta { alpha, beta } => write!(f, "W[{alpha},{beta}]"),
            Self::HopfUnion { left, right } => write!(f, "hopf({left},{right})"),
        }
    }
}

impl FromStr for LinkFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &str) -> Error {
        Error::Parse { position: self.pos, expected: expected.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_is(&mut self, tok: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(tok.as_bytes())
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.peek_is(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("'{tok}'")))
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.error("integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse { position: start, expected: "integer in range".into() })
    }

    fn nat(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        let v = self.int()?;
        u32::try_from(v).map_err(|_| Error::Parse { position: start, expected: "non-negative integer".into() })
    }

    fn link(&mut self) -> Result<LinkFamily> {
        if self.eat("4_1") {
            Ok(LinkFamily::FigureEight)
        } else if self.eat("WL") {
            Ok(LinkFamily::WhiteheadLink)
        } else if self.eat("WD^") {
            let p = self.nat()?;
            self.expect("(")?;
            self.expect("4_1")?;
            self.expect(")")?;
            Ok(LinkFamily::IteratedDoubleFigEight { p })
        } else if self.eat("W(") {
            let a = self.int()?;
            self.expect(",")?;
            let c = self.nat()?;
            self.expect(",")?;
            let d = self.nat()?;
            self.expect(")")?;
            self.expect("*")?;
            self.expect("4_1")?;
            Ok(LinkFamily::WhiteheadChainCabledFigEight { a, c, d })
        } else if self.eat("W[") {
            let alpha = self.nat()?;
            self.expect(",")?;
            let beta = self.nat()?;
            self.expect("]")?;
            Ok(LinkFamily::WAlphaBeta { alpha, beta })
        } else if self.eat("hopf(") {
            let left = self.link()?;
            self.expect(",")?;
            let right = self.link()?;
            self.expect(")")?;
            Ok(LinkFamily::HopfUnion { left: Box::new(left), right: Box::new(right) })
        } else if self.eat("U") {
            Ok(LinkFamily::Unknot)
        } else {
            Err(self.error("one of U, 4_1, WL, W(a,c,d)*4_1, WD^p(4_1), W[alpha,beta], hopf(K1,K2)"))
        }
    }
}

/// The (a, c, d) parameters of a hyperbolic Whitehead-chain piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainPiece {
    pub a: i64,
    pub c: u32,
    pub d: u32,
}

/// JSJ piece counts of a link complement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JsjProfile {
    pub fig_eight_pieces: u32,
    pub whitehead_pieces: u32,
    pub chain_piece: Option<ChainPiece>,
    /// Seifert-fibred pieces; they carry no volume.
    pub seifert_pieces: u32,
}

impl JsjProfile {
    fn merge(self, other: Self) -> Self {
        Self {
            fig_eight_pieces: self.fig_eight_pieces + other.fig_eight_pieces,
            whitehead_pieces: self.whitehead_pieces + other.whitehead_pieces,
            chain_piece: self.chain_piece.or(other.chain_piece),
            seifert_pieces: self.seifert_pieces + other.seifert_pieces,
        }
    }
}

/// JSJ piece profile of the complement of `link`.
pub fn jsj_profile(link: &LinkFamily) -> JsjProfile {
    let base = JsjProfile::default();
    match link {
        LinkFamily::Unknot => base,
        LinkFamily::FigureEight => JsjProfile { fig_eight_pieces: 1, ..base },
        LinkFamily::WhiteheadLink => JsjProfile { whitehead_pieces: 1, ..base },
        LinkFamily::WhiteheadChainCabledFigEight { a, c, d } => {
            JsjProfile { fig_eight_pieces: 1, chain_piece: Some(ChainPiece { a: *a, c: *c, d: *d }), ..base }
        }
        LinkFamily::IteratedDoubleFigEight { p } => JsjProfile { fig_eight_pieces: 1, whitehead_pieces: p + 1, ..base },
        LinkFamily::WAlphaBeta { alpha, beta } => JsjProfile { whitehead_pieces: alpha + beta, ..base },
        LinkFamily::HopfUnion { left, right } => {
            jsj_profile(left).merge(jsj_profile(right)).merge(JsjProfile { seifert_pieces: 3, ..base })
        }
    }
}

/// Hyperbolic volumes of the two building blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeConstants {
    /// `Vol(S³∖4₁) = 6Λ(π/3)`.
    pub vol_fig8: f64,
    /// `Vol(S³∖WL) = 8Λ(π/4)`.
    pub vol_wl: f64,
    /// Volume of the regular ideal tetrahedron, `vol_fig8 / 2`.
    pub v3: f64,
}

impl VolumeConstants {
    pub fn new() -> Self {
        let pi = std::f64::consts::PI;
        let vol_fig8 = 6.0 * lobachevsky(pi / 3.0);
        let vol_wl = 8.0 * lobachevsky(pi / 4.0);
        Self { vol_fig8, vol_wl, v3: vol_fig8 / 2.0 }
    }

    /// `(vol_fig8, vol_wl)` at `bits` of precision.
    pub fn high_precision(bits: u32) -> (Float, Float) {
        let pi = crate::numeric::pi(bits);
        let fig8 = lobachevsky_hp(&Float::with_val(bits, &pi / 3u32)) * 6u32;
        let wl = lobachevsky_hp(&Float::with_val(bits, &pi / 4u32)) * 8u32;
        (fig8, wl)
    }
}

impl Default for VolumeConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `v₃·‖S³∖L‖`, the sum of the hyperbolic volumes of the JSJ pieces.
///
/// The Whitehead-chain piece `W_{a,1,c,d}` contributes `(c+d)·vol_wl`; the
/// potential module's critical-value computation confirms this independently
/// of `a`.
pub fn simplicial_volume(link: &LinkFamily, vc: &VolumeConstants) -> f64 {
    let prof = jsj_profile(link);
    let chain = prof.chain_piece.map_or(0.0, |ch| f64::from(ch.c + ch.d) * vc.vol_wl);
    f64::from(prof.fig_eight_pieces) * vc.vol_fig8 + f64::from(prof.whitehead_pieces) * vc.vol_wl + chain
}
