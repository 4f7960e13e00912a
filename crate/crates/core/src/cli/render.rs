//! ASCII and SVG drawings of hexagon states.
//!
//! Vertices sit at U (top), A (upper left), E (upper right), I (lower
//! left), O (lower right) and Y (bottom). Implications are solid arrows,
//! contrarieties dashed, subcontrarieties dotted and contradictions double
//! lines. Modalities that hold are highlighted. Renderers refuse states that
//! break the hexagon.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modality::{
    check_equivalences, check_hexagon, hexagon_relations, modalities_of, ModalAssignment, ModalVerdict, Modality,
    RelationKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("inconsistent hexagon state: {0}")]
    Inconsistent(String),
    #[error("nested hexagon breaks the implication {0}")]
    ChainViolation(&'static str),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GlyphStyle {
    /// □ ◇ ∇ Δ
    #[default]
    Alethic,
    /// ⊞ ⟡ with a plus marker on the others
    Probabilistic,
}

impl GlyphStyle {
    pub fn glyph(self, m: Modality) -> &'static str {
        use Modality::*;
        match (self, m) {
            (GlyphStyle::Alethic, A) => "□",
            (GlyphStyle::Alethic, E) => "¬◇",
            (GlyphStyle::Alethic, Y) => "∇",
            (GlyphStyle::Alethic, I) => "◇",
            (GlyphStyle::Alethic, O) => "¬□",
            (GlyphStyle::Alethic, U) => "Δ",
            (GlyphStyle::Probabilistic, A) => "⊞",
            (GlyphStyle::Probabilistic, E) => "¬⟡",
            (GlyphStyle::Probabilistic, Y) => "∇⁺",
            (GlyphStyle::Probabilistic, I) => "⟡",
            (GlyphStyle::Probabilistic, O) => "¬⊞",
            (GlyphStyle::Probabilistic, U) => "Δ⁺",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HexagonState {
    label: String,
    assignment: ModalAssignment,
    style: GlyphStyle,
}

fn validate(assignment: &ModalAssignment) -> Result<(), RenderError> {
    let violated = check_hexagon(assignment);
    if !violated.is_empty() {
        let names: Vec<String> = violated.iter().map(|r| r.to_string()).collect();
        return Err(RenderError::Inconsistent(names.join(", ")));
    }
    let broken = check_equivalences(assignment);
    if !broken.is_empty() {
        let names: Vec<String> = broken.iter().map(|m| format!("definition of {m}")).collect();
        return Err(RenderError::Inconsistent(names.join(", ")));
    }
    Ok(())
}

impl HexagonState {
    pub fn new(label: impl Into<String>, assignment: ModalAssignment, style: GlyphStyle) -> Result<Self, RenderError> {
        validate(&assignment)?;
        Ok(HexagonState { label: label.into(), assignment, style })
    }

    pub fn from_verdict(label: impl Into<String>, verdict: ModalVerdict, style: GlyphStyle) -> Self {
        HexagonState { label: label.into(), assignment: modalities_of(verdict), style }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn assignment(&self) -> ModalAssignment {
        self.assignment
    }

    pub fn style(&self) -> GlyphStyle {
        self.style
    }
}

/// An alethic state with a probabilistic state drawn inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestedState {
    label: String,
    outer: ModalAssignment,
    inner: ModalAssignment,
}

impl NestedState {
    /// `outer` holds the GFBST modalities, `inner` the cutoff-test ones.
    pub fn new(label: impl Into<String>, outer: ModalAssignment, inner: ModalAssignment) -> Result<Self, RenderError> {
        validate(&outer)?;
        validate(&inner)?;
        if outer.get(Modality::A) && !inner.get(Modality::A) {
            return Err(RenderError::ChainViolation("□H ⇒ ⊞H"));
        }
        if inner.get(Modality::I) && !outer.get(Modality::I) {
            return Err(RenderError::ChainViolation("⟡H ⇒ ◇H"));
        }
        Ok(NestedState { label: label.into(), outer, inner })
    }
}

fn cell(state: &HexagonState, m: Modality) -> String {
    let text = format!("{} {}", m.letter(), state.style.glyph(m));
    if state.assignment.get(m) {
        format!("[{text}]")
    } else {
        format!(" {text} ")
    }
}

fn edge_symbol(kind: RelationKind) -> &'static str {
    match kind {
        RelationKind::Implication => "-->",
        RelationKind::Contrariety => "- -",
        RelationKind::Subcontrariety => ". .",
        RelationKind::Contradiction => "===",
    }
}

fn kind_legend(kind: RelationKind) -> &'static str {
    match kind {
        RelationKind::Implication => "implication (solid arrow)",
        RelationKind::Contrariety => "contrariety (dashed)",
        RelationKind::Subcontrariety => "subcontrariety (dotted)",
        RelationKind::Contradiction => "contradiction (double)",
    }
}

const KINDS: [RelationKind; 4] =
    [RelationKind::Implication, RelationKind::Contrariety, RelationKind::Subcontrariety, RelationKind::Contradiction];

fn pad(s: &str, width: usize) -> String {
    let len = s.chars().count();
    format!("{s}{}", " ".repeat(width.saturating_sub(len)))
}

pub fn render_ascii(state: &HexagonState) -> String {
    use Modality::*;
    let c = |m| cell(state, m);
    let mut out = String::new();
    let _ = writeln!(out, "{} ({})", state.label, style_name(state.style));
    let _ = writeln!(out);
    let _ = writeln!(out, "              {}", c(U));
    let _ = writeln!(out, "            /        \\");
    let _ = writeln!(out, "     {}{}", pad(&c(A), 17), c(E));
    let _ = writeln!(out, "        |                 |");
    let _ = writeln!(out, "     {}{}", pad(&c(I), 17), c(O));
    let _ = writeln!(out, "            \\        /");
    let _ = writeln!(out, "              {}", c(Y));
    let _ = writeln!(out);
    let holding: Vec<String> = state.assignment.holding().iter().map(|m| m.letter().to_string()).collect();
    let _ = writeln!(out, "holds: {}", holding.join(" "));
    for kind in KINDS {
        let edges: Vec<String> = hexagon_relations()
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| format!("{} {} {}", r.from, edge_symbol(kind), r.to))
            .collect();
        let _ = writeln!(out, "{}{}", pad(kind_legend(kind), 27), edges.join("   "));
    }
    out
}

pub fn render_nested_ascii(state: &NestedState) -> String {
    let outer =
        HexagonState { label: format!("{} / outer", state.label), assignment: state.outer, style: GlyphStyle::Alethic };
    let inner = HexagonState {
        label: format!("{} / inner", state.label),
        assignment: state.inner,
        style: GlyphStyle::Probabilistic,
    };
    let mut out = render_ascii(&outer);
    out.push('\n');
    out.push_str(&render_ascii(&inner));
    out.push_str(
        "\nbridges: A(outer) --> A(inner)   I(inner) --> I(outer)   O(inner) --> O(outer)   E(outer) --> E(inner)\n",
    );
    out
}

fn style_name(style: GlyphStyle) -> &'static str {
    match style {
        GlyphStyle::Alethic => "alethic",
        GlyphStyle::Probabilistic => "probabilistic",
    }
}

const CENTER: (f64, f64) = (200.0, 230.0);

fn vertex_offset(m: Modality) -> (f64, f64) {
    match m {
        Modality::U => (0.0, -160.0),
        Modality::A => (-130.0, -80.0),
        Modality::E => (130.0, -80.0),
        Modality::I => (-130.0, 80.0),
        Modality::O => (130.0, 80.0),
        Modality::Y => (0.0, 160.0),
    }
}

#[derive(Clone, Copy)]
struct Frame {
    scale: f64,
    radius: f64,
    font: f64,
}

impl Frame {
    fn at(&self, m: Modality, origin: (f64, f64)) -> (f64, f64) {
        let (dx, dy) = vertex_offset(m);
        (origin.0 + dx * self.scale, origin.1 + dy * self.scale)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn shortened(p: (f64, f64), q: (f64, f64), r1: f64, r2: f64) -> ((f64, f64), (f64, f64)) {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let len = (dx * dx + dy * dy).sqrt();
    let (ux, uy) = (dx / len, dy / len);
    ((p.0 + ux * r1, p.1 + uy * r1), (q.0 - ux * r2, q.1 - uy * r2))
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), attrs: &str) {
    let _ = writeln!(out, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" {attrs}/>"#, a.0, a.1, b.0, b.1);
}

fn svg_hexagon(out: &mut String, assignment: ModalAssignment, style: GlyphStyle, frame: Frame, origin: (f64, f64)) {
    for r in hexagon_relations() {
        let (a, b) = shortened(frame.at(r.from, origin), frame.at(r.to, origin), frame.radius, frame.radius);
        match r.kind {
            RelationKind::Implication => line(out, a, b, r##"stroke="#000" marker-end="url(#arrow)""##),
            RelationKind::Contrariety => line(out, a, b, r##"stroke="#000" stroke-dasharray="8 5""##),
            RelationKind::Subcontrariety => line(out, a, b, r##"stroke="#000" stroke-dasharray="2 4""##),
            RelationKind::Contradiction => {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len = (dx * dx + dy * dy).sqrt();
                let (nx, ny) = (-dy / len * 2.5, dx / len * 2.5);
                for sign in [1.0, -1.0] {
                    let shift = |p: (f64, f64)| (p.0 + sign * nx, p.1 + sign * ny);
                    line(out, shift(a), shift(b), r##"stroke="#000""##);
                }
            }
        }
    }
    for m in Modality::ALL {
        let (x, y) = frame.at(m, origin);
        let fill = if assignment.get(m) { "#ffd54f" } else { "#ffffff" };
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.1}" cy="{y:.1}" r="{:.1}" fill="{fill}" stroke="#000" stroke-width="{}"/>"##,
            frame.radius,
            if assignment.get(m) { 2 } else { 1 }
        );
        let glyph = GlyphStyle::Alethic.glyph(m);
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-size="{:.1}" text-anchor="middle">{}</text>"#,
            y + frame.font * 0.35,
            frame.font,
            escape(glyph)
        );
        if style == GlyphStyle::Probabilistic {
            let _ = writeln!(
                out,
                r##"<text x="{x:.1}" y="{:.1}" font-size="{:.1}" text-anchor="middle" fill="#c62828">+</text>"##,
                y + frame.font * 0.35,
                frame.font * 0.8
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-size="{:.1}" text-anchor="middle">{}</text>"#,
            y + frame.radius + frame.font,
            frame.font * 0.7,
            m.letter()
        );
    }
}

const DEFS: &str = r##"<defs>
<marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="7" markerHeight="7" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#000"/></marker>
<marker id="bridge" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="7" markerHeight="7" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#1565c0"/></marker>
</defs>
"##;

const OUTER: Frame = Frame { scale: 1.0, radius: 24.0, font: 18.0 };
const INNER: Frame = Frame { scale: 0.45, radius: 15.0, font: 12.0 };

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="serif">"#
    );
    out.push_str(DEFS);
}

fn svg_title(out: &mut String, text: &str, y: f64) {
    let _ =
        writeln!(out, r#"<text x="200.0" y="{y:.1}" font-size="14.0" text-anchor="middle">{}</text>"#, escape(text));
}

const PANEL_HEIGHT: f64 = 440.0;

/// One SVG document holding every state, stacked vertically.
pub fn render_svg_stack(states: &[HexagonState]) -> String {
    let mut out = String::new();
    svg_open(&mut out, 400.0, PANEL_HEIGHT * states.len().max(1) as f64);
    for (k, state) in states.iter().enumerate() {
        let top = PANEL_HEIGHT * k as f64;
        let _ = writeln!(out, r#"<g id="panel-{k}">"#);
        svg_title(&mut out, &format!("{} ({})", state.label, style_name(state.style)), top + 24.0);
        svg_hexagon(&mut out, state.assignment, state.style, OUTER, (CENTER.0, top + CENTER.1));
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_svg(state: &HexagonState) -> String {
    render_svg_stack(std::slice::from_ref(state))
}

pub fn render_nested_svg(state: &NestedState) -> String {
    let mut out = String::new();
    svg_open(&mut out, 400.0, PANEL_HEIGHT);
    svg_title(&mut out, &state.label, 24.0);
    svg_hexagon(&mut out, state.outer, GlyphStyle::Alethic, OUTER, CENTER);
    svg_hexagon(&mut out, state.inner, GlyphStyle::Probabilistic, INNER, CENTER);
    use Modality::*;
    for (from, from_outer, to, to_outer) in
        [(A, true, A, false), (I, false, I, true), (O, false, O, true), (E, true, E, false)]
    {
        let frame = |outer: bool| if outer { OUTER } else { INNER };
        let (a, b) = shortened(
            frame(from_outer).at(from, CENTER),
            frame(to_outer).at(to, CENTER),
            frame(from_outer).radius,
            frame(to_outer).radius,
        );
        line(&mut out, a, b, r##"stroke="#1565c0" stroke-width="1.5" marker-end="url(#bridge)""##);
    }
    out.push_str("</svg>\n");
    out
}
