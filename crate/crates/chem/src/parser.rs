//! Chemkin-style mechanism text: parser and serializer.
//!
//! Supported grammar: ELEMENTS / SPECIES / THERMO / REACTIONS sections with
//! `!` comments, case-insensitive keywords, `=` / `<=>` / `=>` reaction
//! arrows, integer stoichiometric prefixes, `+M` third bodies with
//! per-species efficiency lines, `REV / A b Ea /` explicit reverse
//! parameters, and `DUP` flags. THERMO entries are fixed-column NASA-7
//! records. Pressure-dependent reactions (falloff, PLOG, Chebyshev) and
//! reaction-order overrides are rejected with a diagnostic rather than
//! silently mis-read.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ChemError;
use crate::mechanism::{Arrhenius, Mechanism, Reaction, ReverseRate, Species, ThirdBody};
use crate::thermo::Nasa7;

/// Diagnostic severity. Errors abort parsing; warnings do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One parse finding, tied to a 1-based source line.
#[derive(Debug, Clone)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub line: usize,
    pub message: String,
}

impl ParseDiagnostic {
    fn error(line: usize, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            line,
            message: message.into(),
        }
    }

    fn warning(line: usize, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "line {}: {}: {}", self.line, tag, self.message)
    }
}

/// Thermo database entry: the polynomial fit plus the elemental composition
/// read from the fixed-column header.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoEntry {
    pub fit: Nasa7,
    pub composition: BTreeMap<String, u32>,
}

const UNSUPPORTED_AUX: [&str; 7] = ["LOW", "TROE", "SRI", "PLOG", "FORD", "HIGH", "CHEB"];

/// Parses a self-contained mechanism file.
pub fn parse_mechanism(text: &str) -> Result<Mechanism, Vec<ParseDiagnostic>> {
    Parser::new(None).run(text)
}

/// Parses a mechanism plus an external thermo database; inline THERMO data
/// takes precedence over the external file.
pub fn parse_mechanism_with_thermo(
    text: &str,
    thermo_text: &str,
) -> Result<Mechanism, Vec<ParseDiagnostic>> {
    let external = parse_thermo(thermo_text)?;
    Parser::new(Some(&external)).run(text)
}

/// Parses a standalone thermo database file.
pub fn parse_thermo(text: &str) -> Result<BTreeMap<String, ThermoEntry>, Vec<ParseDiagnostic>> {
    let mut body = Vec::new();
    for (ln, line) in numbered_lines(text) {
        let first = line.split_whitespace().next().map(str::to_uppercase);
        match first.as_deref() {
            None | Some("THERMO") => continue,
            Some("END") => break,
            _ => body.push((ln, line)),
        }
    }
    let mut diags = Vec::new();
    let entries = parse_thermo_block(&body, &mut diags);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        Err(diags)
    } else {
        Ok(entries)
    }
}

/// Comment-stripped lines with their 1-based numbers.
fn numbered_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            let cut = l.find('!').map_or(l, |p| &l[..p]);
            (i + 1, cut.to_string())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Idle,
    Elements,
    Species,
    Thermo,
    Reactions,
}

struct Parser<'a> {
    external: Option<&'a BTreeMap<String, ThermoEntry>>,
    diags: Vec<ParseDiagnostic>,
    elements: Vec<String>,
    /// (declaration line, name) in declaration order.
    species_names: Vec<(usize, String)>,
    thermo_lines: Vec<(usize, String)>,
    reactions: Vec<Reaction>,
    reaction_lines: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn new(external: Option<&'a BTreeMap<String, ThermoEntry>>) -> Self {
        Self {
            external,
            diags: Vec::new(),
            elements: Vec::new(),
            species_names: Vec::new(),
            thermo_lines: Vec::new(),
            reactions: Vec::new(),
            reaction_lines: Vec::new(),
        }
    }

    fn error(&mut self, line: usize, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic::error(line, message));
    }

    fn species_index(&self, name: &str) -> Option<usize> {
        self.species_names.iter().position(|(_, n)| n == name)
    }

    fn run(mut self, text: &str) -> Result<Mechanism, Vec<ParseDiagnostic>> {
        let mut mode = Mode::Idle;
        for (ln, line) in numbered_lines(text) {
            let mut tokens = line.split_whitespace();
            let Some(first) = tokens.next() else { continue };
            let upper = first.to_uppercase();
            match upper.as_str() {
                "ELEMENTS" | "ELEM" => {
                    mode = Mode::Elements;
                    self.take_elements(&mut mode, ln, tokens);
                    continue;
                }
                "SPECIES" | "SPEC" => {
                    mode = Mode::Species;
                    self.take_species(&mut mode, ln, tokens);
                    continue;
                }
                "THERMO" => {
                    // An optional ALL token and nothing else belongs here.
                    mode = Mode::Thermo;
                    continue;
                }
                "REACTIONS" | "REAC" => {
                    mode = Mode::Reactions;
                    for unit in tokens {
                        let u = unit.to_uppercase();
                        if u != "CAL/MOLE" && u != "MOLES" {
                            self.error(
                                ln,
                                format!("unsupported rate units `{unit}`; only CAL/MOLE is supported"),
                            );
                        }
                    }
                    continue;
                }
                "END" => {
                    mode = Mode::Idle;
                    continue;
                }
                _ => {}
            }
            match mode {
                Mode::Idle => {
                    self.diags.push(ParseDiagnostic::warning(
                        ln,
                        format!("text outside any section ignored: `{}`", line.trim()),
                    ));
                }
                Mode::Elements => {
                    let all = std::iter::once(first).chain(tokens);
                    self.take_elements(&mut mode, ln, all);
                }
                Mode::Species => {
                    let all = std::iter::once(first).chain(tokens);
                    self.take_species(&mut mode, ln, all);
                }
                Mode::Thermo => self.thermo_lines.push((ln, line.clone())),
                Mode::Reactions => {
                    if line.contains('=') {
                        self.parse_reaction_line(ln, &line);
                    } else {
                        self.parse_aux_line(ln, &line);
                    }
                }
            }
        }
        self.finalize()
    }

    fn take_elements<'t>(&mut self, mode: &mut Mode, _ln: usize, tokens: impl Iterator<Item = &'t str>) {
        for tok in tokens {
            let up = tok.to_uppercase();
            if up == "END" {
                *mode = Mode::Idle;
                return;
            }
            if !self.elements.contains(&up) {
                self.elements.push(up);
            }
        }
    }

    fn take_species<'t>(&mut self, mode: &mut Mode, ln: usize, tokens: impl Iterator<Item = &'t str>) {
        for tok in tokens {
            if tok.to_uppercase() == "END" {
                *mode = Mode::Idle;
                return;
            }
            if self.species_index(tok).is_some() {
                self.error(ln, format!("species `{tok}` declared more than once"));
            } else {
                self.species_names.push((ln, tok.to_string()));
            }
        }
    }

    fn parse_reaction_line(&mut self, ln: usize, line: &str) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 4 {
            self.error(
                ln,
                "a reaction line needs an equation and three rate parameters",
            );
            return;
        }
        let mut nums = [0.0f64; 3];
        for (i, tok) in tokens[tokens.len() - 3..].iter().enumerate() {
            match tok.parse() {
                Ok(v) => nums[i] = v,
                Err(_) => {
                    self.error(ln, format!("malformed rate parameter `{tok}`"));
                    return;
                }
            }
        }
        let equation: String = tokens[..tokens.len() - 3].concat();
        if equation.contains("(+") {
            self.error(
                ln,
                "pressure-dependent (falloff) reactions are not supported",
            );
            return;
        }
        let (lhs, rhs, reversible) = if let Some((l, r)) = equation.split_once("<=>") {
            (l, r, true)
        } else if let Some((l, r)) = equation.split_once("=>") {
            (l, r, false)
        } else if let Some((l, r)) = equation.split_once('=') {
            (l, r, true)
        } else {
            self.error(ln, "reaction equation has no `=`");
            return;
        };
        let Some((reactants, tb_left)) = self.parse_side(ln, lhs) else {
            return;
        };
        let Some((products, tb_right)) = self.parse_side(ln, rhs) else {
            return;
        };
        if tb_left != tb_right {
            self.error(ln, "third body M must appear on both sides or neither");
            return;
        }
        if reactants.is_empty() || products.is_empty() {
            self.error(ln, "reaction equation has an empty side");
            return;
        }
        self.reactions.push(Reaction {
            reactants,
            products,
            forward: Arrhenius {
                a: nums[0],
                b: nums[1],
                e_a: nums[2],
            },
            reverse: if reversible {
                ReverseRate::FromEquilibrium
            } else {
                ReverseRate::None
            },
            third_body: tb_left.then(ThirdBody::default),
            duplicate: false,
        });
        self.reaction_lines.push(ln);
    }

    /// Parses one side of an equation into sorted (species, stoich) pairs and
    /// a third-body flag. Species names containing `+` are recovered by
    /// greedily re-joining fragments until a declared name matches.
    fn parse_side(&mut self, ln: usize, side: &str) -> Option<(Vec<(usize, u32)>, bool)> {
        let fragments: Vec<&str> = side.split('+').collect();
        let mut stoich: BTreeMap<usize, u32> = BTreeMap::new();
        let mut third_body = false;
        let mut i = 0;
        while i < fragments.len() {
            let frag = fragments[i];
            if frag.is_empty() {
                self.error(ln, "reaction equation has an empty species");
                return None;
            }
            if frag == "M" {
                third_body = true;
                i += 1;
                continue;
            }
            let digits = frag.bytes().take_while(u8::is_ascii_digit).count();
            let count: u32 = if digits == 0 {
                1
            } else {
                match frag[..digits].parse() {
                    Ok(c) if c > 0 => c,
                    _ => {
                        self.error(ln, format!("bad stoichiometric prefix in `{frag}`"));
                        return None;
                    }
                }
            };
            let base = &frag[digits..];
            let mut name = base.to_string();
            let mut j = i;
            while self.species_index(&name).is_none() && j + 1 < fragments.len() {
                j += 1;
                name.push('+');
                name.push_str(fragments[j]);
            }
            match self.species_index(&name) {
                Some(idx) => {
                    *stoich.entry(idx).or_insert(0) += count;
                    i = j + 1;
                }
                None => {
                    self.error(ln, format!("species `{base}` is not declared"));
                    return None;
                }
            }
        }
        Some((stoich.into_iter().collect(), third_body))
    }

    fn parse_aux_line(&mut self, ln: usize, line: &str) {
        let trimmed = line.trim();
        let first = trimmed
            .split_whitespace()
            .next()
            .expect("caller skips blank lines");
        let first_up = first.to_uppercase();
        let keyword = first_up.split('/').next().unwrap_or("").to_string();
        if self.reactions.is_empty() {
            self.error(ln, "auxiliary data before any reaction");
            return;
        }
        if keyword == "DUP" || keyword == "DUPLICATE" {
            self.reactions.last_mut().unwrap().duplicate = true;
            return;
        }
        if keyword == "REV" {
            self.parse_rev(ln, trimmed);
            return;
        }
        if UNSUPPORTED_AUX.contains(&keyword.as_str()) {
            self.error(
                ln,
                format!("auxiliary keyword `{keyword}` is not supported"),
            );
            return;
        }
        if trimmed.contains('/') {
            self.parse_efficiencies(ln, trimmed);
        } else {
            self.error(ln, format!("unrecognized line `{trimmed}`"));
        }
    }

    fn parse_rev(&mut self, ln: usize, text: &str) {
        let (Some(a), Some(b)) = (text.find('/'), text.rfind('/')) else {
            self.error(ln, "REV parameters must be enclosed in slashes");
            return;
        };
        if b <= a {
            self.error(ln, "REV parameters must be enclosed in slashes");
            return;
        }
        let vals: Vec<f64> = text[a + 1..b]
            .split_whitespace()
            .filter_map(|t| t.parse().ok())
            .collect();
        if vals.len() != 3 || text[a + 1..b].split_whitespace().count() != 3 {
            self.error(ln, "REV needs exactly three numbers: A b E_a");
            return;
        }
        let last = self.reactions.last_mut().unwrap();
        if matches!(last.reverse, ReverseRate::None) {
            self.error(ln, "REV given for an irreversible reaction");
            return;
        }
        last.reverse = ReverseRate::Explicit(Arrhenius {
            a: vals[0],
            b: vals[1],
            e_a: vals[2],
        });
    }

    fn parse_efficiencies(&mut self, ln: usize, text: &str) {
        let pieces: Vec<&str> = text.split('/').collect();
        if pieces.len().is_multiple_of(2) || !pieces.last().unwrap().trim().is_empty() {
            self.error(ln, "malformed efficiency list; expected NAME/VALUE/ pairs");
            return;
        }
        let mut resolved: Vec<(usize, f64)> = Vec::new();
        for pair in pieces[..pieces.len() - 1].chunks(2) {
            let name = pair[0].trim();
            let value: f64 = match pair[1].trim().parse() {
                Ok(v) => v,
                Err(_) => {
                    self.error(ln, format!("malformed efficiency value `{}`", pair[1].trim()));
                    return;
                }
            };
            match self.species_index(name) {
                Some(idx) => resolved.push((idx, value)),
                None => {
                    self.error(ln, format!("species `{name}` is not declared"));
                    return;
                }
            }
        }
        let last = self.reactions.last_mut().unwrap();
        let Some(tb) = last.third_body.as_mut() else {
            self.error(ln, "efficiencies given for a reaction without +M");
            return;
        };
        for (idx, value) in resolved {
            tb.efficiencies.insert(idx, value);
        }
    }

    fn finalize(mut self) -> Result<Mechanism, Vec<ParseDiagnostic>> {
        let mut inline_diags = Vec::new();
        let inline = parse_thermo_block(&self.thermo_lines, &mut inline_diags);
        self.diags.extend(inline_diags);

        let mut species = Vec::new();
        for (ln, name) in self.species_names.clone() {
            let entry = inline
                .get(&name)
                .or_else(|| self.external.and_then(|m| m.get(&name)));
            let fit = entry.map(|e| e.fit.clone());
            let composition = match entry.filter(|e| !e.composition.is_empty()) {
                Some(e) => e.composition.clone(),
                None => match formula_composition(&name, &self.elements) {
                    Some(c) => c,
                    None => {
                        self.error(
                            ln,
                            format!("cannot infer elemental composition for species `{name}`"),
                        );
                        BTreeMap::new()
                    }
                },
            };
            species.push(Species {
                name,
                composition,
                thermo: fit,
            });
        }

        for (r, &ln) in self.reactions.iter().zip(&self.reaction_lines) {
            if matches!(r.reverse, ReverseRate::FromEquilibrium) {
                for &(s, _) in r.reactants.iter().chain(&r.products) {
                    if species[s].thermo.is_none() {
                        self.diags.push(ParseDiagnostic::error(
                            ln,
                            format!(
                                "species `{}` lacks thermo data required for the equilibrium reverse rate",
                                species[s].name
                            ),
                        ));
                    }
                }
            }
        }

        if self.diags.iter().any(|d| d.severity == Severity::Error) {
            return Err(self.diags);
        }

        match Mechanism::new(self.elements.clone(), species, self.reactions.clone()) {
            Ok(m) => Ok(m),
            Err(e) => {
                let line = match &e {
                    ChemError::Unbalanced { reaction, .. }
                    | ChemError::UndeclaredSpecies { reaction, .. }
                    | ChemError::UnsupportedOrder { reaction, .. } => {
                        self.reaction_lines.get(*reaction).copied().unwrap_or(1)
                    }
                    _ => 1,
                };
                self.diags.push(ParseDiagnostic::error(line, e.to_string()));
                Err(self.diags)
            }
        }
    }
}

/// Parses fixed-column NASA-7 entries (4 lines each, optionally preceded by a
/// global temperature-range line).
fn parse_thermo_block(
    lines: &[(usize, String)],
    diags: &mut Vec<ParseDiagnostic>,
) -> BTreeMap<String, ThermoEntry> {
    let mut entries = BTreeMap::new();
    let nonblank: Vec<&(usize, String)> = lines
        .iter()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let mut idx = 0;

    // Optional global range line: exactly three floats.
    let mut global_common = None;
    if let Some((_, first)) = nonblank.first() {
        let floats: Vec<f64> = first
            .split_whitespace()
            .filter_map(|t| t.parse().ok())
            .collect();
        if floats.len() == 3 && first.split_whitespace().count() == 3 {
            global_common = Some(floats[1]);
            idx = 1;
        }
    }

    while idx < nonblank.len() {
        if idx + 4 > nonblank.len() {
            diags.push(ParseDiagnostic::error(
                nonblank[idx].0,
                "truncated thermo entry; each species needs 4 lines",
            ));
            break;
        }
        let chunk = &nonblank[idx..idx + 4];
        idx += 4;
        if let Some((name, entry)) = parse_thermo_entry(chunk, global_common, diags) {
            entries.insert(name, entry);
        }
    }
    entries
}

fn parse_thermo_entry(
    chunk: &[&(usize, String)],
    global_common: Option<f64>,
    diags: &mut Vec<ParseDiagnostic>,
) -> Option<(String, ThermoEntry)> {
    let (l1_no, l1_raw) = chunk[0];
    let l1 = format!("{:<80}", l1_raw);
    let Some(name) = l1[..18].split_whitespace().next() else {
        diags.push(ParseDiagnostic::error(*l1_no, "thermo entry has no species name"));
        return None;
    };
    let name = name.to_string();

    let mut composition = BTreeMap::new();
    for g in 0..4 {
        let group = &l1[24 + 5 * g..29 + 5 * g];
        let element = group[..2].trim();
        let count_txt = group[2..].trim();
        if element.is_empty() || element.chars().all(|c| c.is_ascii_digit()) {
            continue;
        }
        let count: f64 = match count_txt.parse() {
            Ok(c) => c,
            Err(_) => {
                diags.push(ParseDiagnostic::error(
                    *l1_no,
                    format!("malformed composition count `{count_txt}` for element `{element}`"),
                ));
                return None;
            }
        };
        if count > 0.0 {
            composition.insert(element.to_uppercase(), count.round() as u32);
        }
    }

    let range = |txt: &str, what: &str, diags: &mut Vec<ParseDiagnostic>| -> Option<f64> {
        match txt.trim().parse() {
            Ok(v) => Some(v),
            Err(_) => {
                diags.push(ParseDiagnostic::error(
                    *l1_no,
                    format!("malformed {what} `{}` in thermo entry for `{name}`", txt.trim()),
                ));
                None
            }
        }
    };
    let t_low = range(&l1[45..55], "low temperature", diags)?;
    let t_high = range(&l1[55..65], "high temperature", diags)?;
    let t_common = if l1[65..73].trim().is_empty() {
        match global_common {
            Some(v) => v,
            None => {
                diags.push(ParseDiagnostic::error(
                    *l1_no,
                    format!("thermo entry for `{name}` has no breakpoint temperature"),
                ));
                return None;
            }
        }
    } else {
        range(&l1[65..73], "breakpoint temperature", diags)?
    };

    let mut coeffs = [0.0f64; 14];
    for (k, (ln, raw)) in chunk[1..4].iter().enumerate() {
        let padded = format!("{:<80}", raw);
        let n_fields = if k == 2 { 4 } else { 5 };
        for f in 0..n_fields {
            let field = padded[15 * f..15 * (f + 1)].trim().replace(['D', 'd'], "E");
            match field.parse() {
                Ok(v) => coeffs[5 * k + f] = v,
                Err(_) => {
                    diags.push(ParseDiagnostic::error(
                        *ln,
                        format!("malformed thermo coefficient `{field}` for `{name}`"),
                    ));
                    return None;
                }
            }
        }
    }
    let high: [f64; 7] = coeffs[..7].try_into().unwrap();
    let low: [f64; 7] = coeffs[7..14].try_into().unwrap();
    match Nasa7::new(t_low, t_common, t_high, low, high) {
        Ok(fit) => Some((name, ThermoEntry { fit, composition })),
        Err(e) => {
            diags.push(ParseDiagnostic::error(*l1_no, e.to_string()));
            None
        }
    }
}

/// Derives a composition from the species name itself: element symbols from
/// the declared element list, optional digit counts, with any trailing
/// parenthesized tag (like an excited-state marker) ignored.
fn formula_composition(name: &str, elements: &[String]) -> Option<BTreeMap<String, u32>> {
    let mut core = name;
    while core.ends_with(')') {
        let open = core.rfind('(')?;
        core = &core[..open];
    }
    if core.is_empty() {
        return None;
    }
    let upper = core.to_uppercase();
    let bytes = upper.as_bytes();
    let mut comp = BTreeMap::new();
    let mut i = 0;
    while i < bytes.len() {
        let sym = [2usize, 1]
            .iter()
            .filter(|&&w| i + w <= bytes.len())
            .map(|&w| &upper[i..i + w])
            .find(|cand| elements.iter().any(|e| e == cand))?;
        let width = sym.len();
        let sym = sym.to_string();
        i += width;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let count: u32 = if start == i {
            1
        } else {
            upper[start..i].parse().ok()?
        };
        if count == 0 {
            return None;
        }
        *comp.entry(sym).or_insert(0) += count;
    }
    Some(comp)
}

/// Formats a value into the 15-column fixed field thermo records use.
fn fmt_fixed15(v: f64) -> String {
    let s = format!("{:.8E}", v);
    let (mant, exp) = s.split_once('E').expect("exponent always present");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    let mant = if mant.starts_with('-') {
        mant.to_string()
    } else {
        format!(" {mant}")
    };
    format!("{mant}E{sign}{:02}", exp.abs())
}

/// Serializes a mechanism back to text. Parsing the output reproduces the
/// mechanism structurally whenever every numeric value fits the field widths
/// (9 significant digits in thermo records; rate parameters are written with
/// full round-trip precision).
pub fn write_mechanism(m: &Mechanism) -> String {
    let mut out = String::new();

    out.push_str("ELEMENTS\n  ");
    out.push_str(&m.elements().join(" "));
    out.push_str("\nEND\n\n");

    out.push_str("SPECIES\n");
    for chunk in m.species().chunks(8) {
        out.push_str("  ");
        let names: Vec<&str> = chunk.iter().map(|s| s.name.as_str()).collect();
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    out.push_str("END\n\n");

    let with_thermo: Vec<&Species> = m.species().iter().filter(|s| s.thermo.is_some()).collect();
    if !with_thermo.is_empty() {
        let lo = with_thermo
            .iter()
            .map(|s| s.thermo.as_ref().unwrap().t_low)
            .fold(f64::INFINITY, f64::min);
        let hi = with_thermo
            .iter()
            .map(|s| s.thermo.as_ref().unwrap().t_high)
            .fold(f64::NEG_INFINITY, f64::max);
        let mid = with_thermo[0].thermo.as_ref().unwrap().t_common;
        out.push_str("THERMO ALL\n");
        out.push_str(&format!("{:10.3}{:10.3}{:10.3}\n", lo, mid, hi));
        for s in &with_thermo {
            let fit = s.thermo.as_ref().unwrap();
            let comp: String = s
                .composition
                .iter()
                .take(4)
                .map(|(e, &n)| format!("{:<2}{:>3}", e, n))
                .collect();
            out.push_str(&format!(
                "{:<18}{:<6}{:<20}G{:10.3}{:10.3}{:8.3}      1\n",
                s.name, "", comp, fit.t_low, fit.t_high, fit.t_common
            ));
            let h = &fit.high;
            let l = &fit.low;
            out.push_str(&format!(
                "{}{}{}{}{}    2\n",
                fmt_fixed15(h[0]),
                fmt_fixed15(h[1]),
                fmt_fixed15(h[2]),
                fmt_fixed15(h[3]),
                fmt_fixed15(h[4])
            ));
            out.push_str(&format!(
                "{}{}{}{}{}    3\n",
                fmt_fixed15(h[5]),
                fmt_fixed15(h[6]),
                fmt_fixed15(l[0]),
                fmt_fixed15(l[1]),
                fmt_fixed15(l[2])
            ));
            out.push_str(&format!(
                "{}{}{}{}{:>20}\n",
                fmt_fixed15(l[3]),
                fmt_fixed15(l[4]),
                fmt_fixed15(l[5]),
                fmt_fixed15(l[6]),
                "4"
            ));
        }
        out.push_str("END\n\n");
    }

    out.push_str("REACTIONS CAL/MOLE\n");
    for r in m.reactions() {
        let side = |pairs: &[(usize, u32)]| -> String {
            let mut parts: Vec<String> = pairs
                .iter()
                .map(|&(s, nu)| {
                    let name = &m.species()[s].name;
                    if nu > 1 {
                        format!("{nu}{name}")
                    } else {
                        name.clone()
                    }
                })
                .collect();
            if r.third_body.is_some() {
                parts.push("M".to_string());
            }
            parts.join("+")
        };
        let arrow = if matches!(r.reverse, ReverseRate::None) {
            "=>"
        } else {
            "="
        };
        let equation = format!("{}{}{}", side(&r.reactants), arrow, side(&r.products));
        out.push_str(&format!(
            "  {:<44} {:e}  {}  {}\n",
            equation, r.forward.a, r.forward.b, r.forward.e_a
        ));
        if let Some(tb) = &r.third_body {
            if !tb.efficiencies.is_empty() {
                let pairs: Vec<String> = tb
                    .efficiencies
                    .iter()
                    .map(|(&s, &e)| format!("{}/{}/", m.species()[s].name, e))
                    .collect();
                out.push_str(&format!("    {}\n", pairs.join(" ")));
            }
        }
        if let ReverseRate::Explicit(arr) = r.reverse {
            out.push_str(&format!("    REV / {:e} {} {} /\n", arr.a, arr.b, arr.e_a));
        }
        if r.duplicate {
            out.push_str("    DUP\n");
        }
    }
    out.push_str("END\n");
    out
}
