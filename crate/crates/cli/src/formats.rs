//! Input/output file formats: the factorization file (surface reference plus
//! entry list) and the curve-expression mini-language.
//!
//! Curve expressions: a registered base name, `twist(about, of, k)`,
//! `bandsum(a, b)`, or `rmod(e, +|-|*)`. An `rmod` enlarges the ambient
//! surface of the whole file; earlier entries are re-anchored automatically.

use palf_core::curve::{band_sum, r_modification, Curve, RVariant};
use palf_core::factorization::Factorization;
use palf_core::models::{build_custom, build_e, build_s_hat, twist_power, Model};
use palf_core::surface::{HandleSurface, Style};
use palf_core::word::Lit;
use serde::{Deserialize, Serialize};
use std::sync::Arc as StdArc;

#[derive(Serialize, Deserialize, Clone)]
pub struct SurfaceRef {
    /// A named model surface: "s_hat" or "e".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// A textual surface spec (see the surface-spec format).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct EntrySpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    /// Raw traversal word: list of [handle, sign] pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<(usize, i8)>>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct FactorizationFile {
    pub surface: SurfaceRef,
    pub entries: Vec<EntrySpec>,
    /// Per-entry rectangle-modification counts (defaults to zeros).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<i64>>,
    /// Declared self-intersection of the section-type class S; the
    /// invariants report re-verifies it against the intersection form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_square: Option<i64>,
}

/// Emit the textual spec of a surface (round-trips through `build_custom`).
pub fn surface_spec(s: &HandleSurface) -> String {
    let mut out = format!("rects {}\n", s.rect_count);
    for h in &s.handles {
        let kw = match h.style {
            Style::Vertical => "vhandle",
            Style::Horizontal => "hhandle",
        };
        out.push_str(&format!("{kw} {} {}\n", h.rect, h.pos));
    }
    out
}

/// Serialize a factorization into a self-contained file (raw words).
pub fn dump_factorization(f: &Factorization, m: &[i64]) -> FactorizationFile {
    FactorizationFile {
        surface: SurfaceRef { model: None, spec: Some(surface_spec(&f.surface)) },
        entries: (0..f.len())
            .map(|j| EntrySpec {
                expr: None,
                word: Some(f.entry(j).word.iter().map(|l| (l.handle, l.sign)).collect()),
            })
            .collect(),
        m: Some(m.to_vec()),
        section_square: None,
    }
}

pub struct LoadedFactorization {
    pub factorization: Factorization,
    pub m: Vec<i64>,
}

pub fn build_model(sr: &SurfaceRef) -> Result<Model, String> {
    match (&sr.model, &sr.spec) {
        (Some(name), None) => match name.as_str() {
            "s_hat" => Ok(build_s_hat()),
            "e" => Ok(build_e()),
            other => Err(format!("unknown model surface {other:?}")),
        },
        (None, Some(spec)) => build_custom(spec),
        _ => Err("surface needs exactly one of `model` or `spec`".to_string()),
    }
}

pub fn load_factorization(file: &FactorizationFile) -> Result<LoadedFactorization, String> {
    let model = build_model(&file.surface)?;
    let mut ambient = model.surface.clone();
    let mut entries: Vec<Curve> = Vec::new();
    for (k, e) in file.entries.iter().enumerate() {
        let c = match (&e.expr, &e.word) {
            (Some(src), None) => eval_expr(&model, &mut ambient, src)
                .map_err(|err| format!("entry {k}: {err}"))?,
            (None, Some(w)) => {
                let word: Vec<Lit> = w
                    .iter()
                    .map(|&(h, s)| {
                        if h >= ambient.handles.len() || (s != 1 && s != -1) {
                            Err(format!("entry {k}: bad letter ({h}, {s})"))
                        } else {
                            Ok(Lit { handle: h, sign: s })
                        }
                    })
                    .collect::<Result<_, _>>()?;
                if word.is_empty() {
                    return Err(format!("entry {k}: empty word"));
                }
                Curve::base(ambient.clone(), word, &format!("entry{k}"))
            }
            _ => return Err(format!("entry {k}: needs exactly one of `expr` or `word`")),
        };
        entries.push(c);
    }
    let entries: Vec<Curve> = entries.into_iter().map(|c| c.on(ambient.clone())).collect();
    let n = entries.len();
    let f = Factorization::new(ambient, entries)?;
    let m = match &file.m {
        Some(m) => {
            if m.len() != n || m.iter().any(|&x| x < 0) {
                return Err(format!("m must hold {n} non-negative counts"));
            }
            m.clone()
        }
        None => vec![0; n],
    };
    Ok(LoadedFactorization { factorization: f, m })
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn eval_expr(
    model: &Model,
    ambient: &mut StdArc<HandleSurface>,
    src: &str,
) -> Result<Curve, String> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let c = p.expr(model, ambient)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(format!("trailing input at byte {}", p.pos));
    }
    Ok(c)
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), String> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected {:?} at byte {}", b as char, self.pos))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'^' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(format!("expected a name at byte {start}"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn integer(&mut self) -> Result<i64, String> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("expected an integer at byte {start}"))
    }

    fn expr(
        &mut self,
        model: &Model,
        ambient: &mut StdArc<HandleSurface>,
    ) -> Result<Curve, String> {
        let id = self.ident()?;
        let is_call = self.peek() == Some(b'(');
        match (id.as_str(), is_call) {
            ("twist", true) => {
                self.expect(b'(')?;
                let about = self.expr(model, ambient)?;
                self.expect(b',')?;
                let of = self.expr(model, ambient)?;
                self.expect(b',')?;
                let k = self.integer()?;
                self.expect(b')')?;
                Ok(twist_power(&about.on(ambient.clone()), &of.on(ambient.clone()), k))
            }
            ("bandsum", true) => {
                self.expect(b'(')?;
                let a = self.expr(model, ambient)?;
                self.expect(b',')?;
                let b = self.expr(model, ambient)?;
                self.expect(b')')?;
                Ok(band_sum(&a.on(ambient.clone()), &b.on(ambient.clone())))
            }
            ("rmod", true) => {
                self.expect(b'(')?;
                let e = self.expr(model, ambient)?;
                self.expect(b',')?;
                let variant = match self.peek() {
                    Some(b'+') => RVariant::Plus,
                    Some(b'-') => RVariant::Minus,
                    Some(b'*') => RVariant::Generic,
                    _ => return Err(format!("expected +, - or * at byte {}", self.pos)),
                };
                self.pos += 1;
                self.expect(b')')?;
                let res = r_modification(&e.on(ambient.clone()), variant, &[])?;
                *ambient = res.surface.clone();
                Ok(res.curve)
            }
            (name, false) => {
                if !model.registry.has_curve(name) {
                    return Err(format!("unknown curve name {name:?}"));
                }
                Ok(model.registry.curve(name).on(ambient.clone()))
            }
            (kw, true) => Err(format!("unknown function {kw:?}")),
        }
    }
}
