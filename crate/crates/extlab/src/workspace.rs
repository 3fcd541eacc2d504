//! Workspace files: a base field, named ring constructions, module presentations and suite
//! configurations.
//!
//! ```json
//! {
//!   "format": 1,
//!   "field": { "p": 2, "e": 1 },
//!   "rings": {
//!     "R": { "monomial_quotient": { "vars": ["y"], "ideal": ["y^2"] } },
//!     "A": { "trivial_extension": { "ring": "R" } }
//!   },
//!   "modules": { "M": { "ring": "A", "generators": 1, "relations": [["y"]] } },
//!   "poly_modules": { "P": { "ring": "R", "generators": 1, "relations": [["x^2 + y"]] } },
//!   "suites": { "quick": { "suite": "trivial-ext-tor", "rings": ["R"], "trials": 5 } }
//! }
//! ```
//!
//! Ring constructors: `monomial_quotient {vars, ideal}`, `quotient {ring, elements}`,
//! `extend {ring, poly}`, `trivial_extension {ring, module?}` (residue field when `module` is
//! absent or `"k"`), `product {left, right}`, `base_change {ring, degree}`,
//! `structure_constants {labels, constants: [[i, j, k, c]], unit, generators?}` and
//! `stock {name}`. Ring references that are not defined in the file fall back to stock rings.
//! Everything is checked when the file is read; algebras are built on first use.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::sync::{Arc, Mutex};

use extlab_core::module::module_from_presentation;
use extlab_core::{FieldElement, FiniteAlgebra, FiniteModule, GaloisField, PolyPresentedModule};
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use serde_json::Value;

use crate::error::{HarnessError, Result};
use crate::expr::{parse_element, parse_monomial, parse_poly_element, parse_univariate};
use crate::stock::stock_ring;
use crate::suites::SuiteConfig;

pub const WORKSPACE_FORMAT: u32 = 1;

/// A JSON object that remembers keys occurring more than once instead of silently
/// keeping the last value.
struct UniqueMap<T> {
    entries: BTreeMap<String, T>,
    duplicates: Vec<String>,
}

impl<T> Default for UniqueMap<T> {
    fn default() -> Self {
        UniqueMap { entries: BTreeMap::new(), duplicates: Vec::new() }
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for UniqueMap<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = UniqueMap<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = UniqueMap::default();
                while let Some((k, v)) = map.next_entry::<String, T>()? {
                    if out.entries.insert(k.clone(), v).is_some() {
                        out.duplicates.push(k);
                    }
                }
                Ok(out)
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkspace {
    format: Option<u32>,
    field: FieldSpec,
    #[serde(default)]
    rings: UniqueMap<Value>,
    #[serde(default)]
    modules: UniqueMap<ModuleDef>,
    #[serde(default)]
    poly_modules: UniqueMap<ModuleDef>,
    #[serde(default)]
    suites: UniqueMap<SuiteConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u32,
    #[serde(default = "one")]
    pub e: u32,
}

fn one() -> u32 {
    1
}

/// A presentation with `generators` generators; each relation lists one entry per generator.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDef {
    pub ring: String,
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RingDef {
    MonomialQuotient { vars: Vec<String>, ideal: Vec<String> },
    Quotient { ring: String, elements: Vec<String> },
    Extend { ring: String, poly: String },
    TrivialExtension { ring: String, module: Option<String> },
    Product { left: String, right: String },
    BaseChange { ring: String, degree: u32 },
    StructureConstants {
        labels: Vec<String>,
        constants: Vec<(usize, usize, usize, i64)>,
        unit: Vec<i64>,
        generators: Option<BTreeMap<String, Vec<i64>>>,
    },
    Stock { name: String },
}

const CONSTRUCTORS: [&str; 8] =
    ["monomial_quotient", "quotient", "extend", "trivial_extension", "product", "base_change", "structure_constants", "stock"];

impl RingDef {
    fn parse(name: &str, v: &Value) -> Result<Self> {
        let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| {
            HarnessError::Validation(format!("ring `{name}` must be an object with exactly one constructor"))
        })?;
        let ctor = obj.keys().next().expect("one key");
        if !CONSTRUCTORS.contains(&ctor.as_str()) {
            return Err(HarnessError::Validation(format!("unknown constructor `{ctor}` for ring `{name}`")));
        }
        serde_json::from_value(v.clone())
            .map_err(|e| HarnessError::Parse { location: format!("rings.{name}"), message: e.to_string() })
    }

    fn ring_refs(&self) -> Vec<&str> {
        match self {
            RingDef::Quotient { ring, .. }
            | RingDef::Extend { ring, .. }
            | RingDef::TrivialExtension { ring, .. }
            | RingDef::BaseChange { ring, .. } => vec![ring],
            RingDef::Product { left, right } => vec![left, right],
            _ => Vec::new(),
        }
    }

    fn module_ref(&self) -> Option<&str> {
        match self {
            RingDef::TrivialExtension { module: Some(m), .. } if m != "k" => Some(m),
            _ => None,
        }
    }
}

pub struct Workspace {
    field: GaloisField,
    rings: BTreeMap<String, RingDef>,
    modules: BTreeMap<String, ModuleDef>,
    poly_modules: BTreeMap<String, ModuleDef>,
    suites: BTreeMap<String, SuiteConfig>,
    cache: Mutex<HashMap<String, Arc<FiniteAlgebra>>>,
}

impl fmt::Debug for Workspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Workspace")
            .field("field", &self.field)
            .field("rings", &self.rings.keys().collect::<Vec<_>>())
            .field("modules", &self.modules.keys().collect::<Vec<_>>())
            .field("poly_modules", &self.poly_modules.keys().collect::<Vec<_>>())
            .field("suites", &self.suites.keys().collect::<Vec<_>>())
            .finish()
    }
}

pub fn parse_workspace(text: &str) -> Result<Workspace> {
    Workspace::parse(text)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Active,
    Done,
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawWorkspace = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if let Some(f) = raw.format.filter(|&f| f != WORKSPACE_FORMAT) {
            return Err(HarnessError::Validation(format!("unsupported workspace format {f}")));
        }
        let field = GaloisField::new(raw.field.p, raw.field.e)?;
        let mut seen = BTreeMap::new();
        let sections = [
            ("rings", raw.rings.entries.keys().collect::<Vec<_>>(), &raw.rings.duplicates),
            ("modules", raw.modules.entries.keys().collect(), &raw.modules.duplicates),
            ("poly_modules", raw.poly_modules.entries.keys().collect(), &raw.poly_modules.duplicates),
            ("suites", raw.suites.entries.keys().collect(), &raw.suites.duplicates),
        ];
        for (section, names, dups) in sections {
            if let Some(d) = dups.first() {
                return Err(HarnessError::Validation(format!("name `{d}` is defined twice in {section}")));
            }
            for n in names {
                if let Some(other) = seen.insert(n.clone(), section) {
                    return Err(HarnessError::Validation(format!("name `{n}` is used in both {other} and {section}")));
                }
            }
        }
        let rings = raw.rings.entries.iter().map(|(n, v)| Ok((n.clone(), RingDef::parse(n, v)?))).collect::<Result<_>>()?;
        let ws = Workspace {
            field,
            rings,
            modules: raw.modules.entries,
            poly_modules: raw.poly_modules.entries,
            suites: raw.suites.entries,
            cache: Mutex::new(HashMap::new()),
        };
        ws.validate()?;
        Ok(ws)
    }

    fn check_ring_ref(&self, r: &str, user: &str) -> Result<()> {
        if self.rings.contains_key(r) || stock_ring(r).is_some() {
            Ok(())
        } else {
            Err(HarnessError::Validation(format!("`{user}` refers to unknown ring `{r}`")))
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, def) in &self.rings {
            for r in def.ring_refs() {
                self.check_ring_ref(r, name)?;
            }
            if let Some(m) = def.module_ref() {
                if !self.modules.contains_key(m) {
                    return Err(HarnessError::Validation(format!("`{name}` refers to unknown module `{m}`")));
                }
            }
        }
        for (name, def) in self.modules.iter().chain(&self.poly_modules) {
            self.check_ring_ref(&def.ring, name)?;
            if let Some(r) = def.relations.iter().find(|r| r.len() != def.generators) {
                return Err(HarnessError::Validation(format!(
                    "a relation of `{name}` has {} entries but there are {} generators",
                    r.len(),
                    def.generators
                )));
            }
        }
        for (name, s) in &self.suites {
            s.validate().map_err(|e| match e {
                HarnessError::Validation(msg) => HarnessError::Validation(format!("suite `{name}`: {msg}")),
                other => other,
            })?;
            for r in &s.rings {
                self.check_ring_ref(r, name)?;
            }
        }
        let mut marks = HashMap::new();
        for name in self.rings.keys().chain(self.modules.keys()) {
            self.visit(name, &mut marks)?;
        }
        Ok(())
    }

    /// Depth-first search over ring and module definitions, rejecting cycles.
    fn visit<'a>(&'a self, name: &'a str, marks: &mut HashMap<&'a str, Mark>) -> Result<()> {
        match marks.get(name) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => return Err(HarnessError::Validation(format!("construction cycle through `{name}`"))),
            None => {}
        }
        marks.insert(name, Mark::Active);
        let deps: Vec<&str> = if let Some(def) = self.rings.get(name) {
            def.ring_refs().into_iter().chain(def.module_ref()).collect()
        } else if let Some(def) = self.modules.get(name) {
            vec![def.ring.as_str()]
        } else {
            Vec::new()
        };
        for d in deps {
            if self.rings.contains_key(d) || self.modules.contains_key(d) {
                self.visit(d, marks)?;
            }
        }
        marks.insert(name, Mark::Done);
        Ok(())
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn ring_names(&self) -> impl Iterator<Item = &str> {
        self.rings.keys().map(String::as_str)
    }

    pub fn module_names(&self) -> impl Iterator<Item = &str> {
        self.modules.keys().map(String::as_str)
    }

    pub fn poly_module_names(&self) -> impl Iterator<Item = &str> {
        self.poly_modules.keys().map(String::as_str)
    }

    pub fn suite_names(&self) -> impl Iterator<Item = &str> {
        self.suites.keys().map(String::as_str)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteConfig> {
        self.suites.get(name)
    }

    pub fn module_def(&self, name: &str) -> Option<&ModuleDef> {
        self.modules.get(name)
    }

    /// The algebra named `name`, built on first use; stock rings are found when the workspace
    /// does not define the name.
    pub fn ring(&self, name: &str) -> Result<Arc<FiniteAlgebra>> {
        if let Some(r) = self.cache.lock().expect("cache lock").get(name) {
            return Ok(Arc::clone(r));
        }
        let built = match self.rings.get(name) {
            Some(def) => Arc::new(self.build_ring(def)?),
            None => stock_ring(name).ok_or_else(|| HarnessError::Validation(format!("unknown ring `{name}`")))??,
        };
        self.cache.lock().expect("cache lock").insert(name.to_string(), Arc::clone(&built));
        Ok(built)
    }

    fn build_ring(&self, def: &RingDef) -> Result<FiniteAlgebra> {
        Ok(match def {
            RingDef::MonomialQuotient { vars, ideal } => {
                let ideal = ideal.iter().map(|m| parse_monomial(vars, m)).collect::<Result<Vec<_>>>()?;
                FiniteAlgebra::monomial_quotient(&self.field, vars, &ideal)?
            }
            RingDef::Quotient { ring, elements } => {
                let r = self.ring(ring)?;
                let els = elements.iter().map(|e| parse_element(&r, e)).collect::<Result<Vec<_>>>()?;
                r.quotient_by_elements(&els)?
            }
            RingDef::Extend { ring, poly } => {
                let r = self.ring(ring)?;
                r.extend_by_polynomial(&parse_univariate(r.field(), poly)?)?
            }
            RingDef::TrivialExtension { ring, module } => {
                let r = self.ring(ring)?;
                match module.as_deref() {
                    None | Some("k") => r.residue_trivial_extension()?,
                    Some(m) => {
                        let m = self.module(m)?;
                        if m.algebra() != &r {
                            return Err(HarnessError::Validation(format!("module is not defined over `{ring}`")));
                        }
                        r.trivial_extension(&m)?
                    }
                }
            }
            RingDef::Product { left, right } => FiniteAlgebra::product(&*self.ring(left)?, &*self.ring(right)?)?,
            RingDef::BaseChange { ring, degree } => self.ring(ring)?.base_change(*degree)?,
            RingDef::StructureConstants { labels, constants, unit, generators } => {
                let f = &self.field;
                let el = |v: i64| -> FieldElement {
                    u32::try_from(v).ok().and_then(|i| f.element(i)).unwrap_or_else(|| f.from_int(v))
                };
                let d = labels.len();
                let mut c = vec![FieldElement::ZERO; d * d * d];
                for &(i, j, k, v) in constants {
                    if i >= d || j >= d || k >= d {
                        return Err(HarnessError::Validation(format!("structure constant ({i}, {j}, {k}) out of range")));
                    }
                    c[(i * d + j) * d + k] = el(v);
                    c[(j * d + i) * d + k] = el(v);
                }
                let alg = FiniteAlgebra::build(f.clone(), labels.clone(), &c, unit.iter().map(|&v| el(v)).collect())?;
                let gens: Vec<(String, Vec<FieldElement>)> = match generators {
                    Some(g) => g.iter().map(|(n, v)| (n.clone(), v.iter().map(|&x| el(x)).collect())).collect(),
                    None => labels
                        .iter()
                        .enumerate()
                        .filter(|(_, l)| l.starts_with(|c: char| c.is_ascii_alphabetic()) && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
                        .map(|(i, l)| (l.clone(), alg.basis_vector(i)))
                        .collect(),
                };
                if gens.iter().any(|(_, v)| v.len() != d) {
                    return Err(HarnessError::Validation("generator vectors must have one entry per basis element".into()));
                }
                alg.with_generators(gens)
            }
            RingDef::Stock { name } => {
                let r = stock_ring(name).ok_or_else(|| HarnessError::Validation(format!("unknown stock ring `{name}`")))??;
                Arc::unwrap_or_clone(r)
            }
        })
    }

    pub fn module(&self, name: &str) -> Result<FiniteModule> {
        let def = self.modules.get(name).ok_or_else(|| HarnessError::Validation(format!("unknown module `{name}`")))?;
        let r = self.ring(&def.ring)?;
        let rels = def
            .relations
            .iter()
            .map(|row| row.iter().map(|e| parse_element(&r, e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(module_from_presentation(&r, def.generators, &rels)?)
    }

    pub fn poly_module(&self, name: &str) -> Result<PolyPresentedModule> {
        let def =
            self.poly_modules.get(name).ok_or_else(|| HarnessError::Validation(format!("unknown poly module `{name}`")))?;
        let r = self.ring(&def.ring)?;
        let rels = def
            .relations
            .iter()
            .map(|row| row.iter().map(|e| parse_poly_element(&r, e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyPresentedModule::new(r, def.generators, rels)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_workspace() {
        let ws = parse_workspace(r#"{"field":{"p":2,"e":1},"rings":{"R":{"monomial_quotient":{"vars":["y"],"ideal":["y^2"]}}}}"#)
            .unwrap();
        assert_eq!(ws.ring_names().collect::<Vec<_>>(), vec!["R"]);
        assert_eq!(ws.ring("R").unwrap().dim(), 2);
        assert!(Arc::ptr_eq(&ws.ring("R").unwrap(), &ws.ring("R").unwrap()));
    }

    fn validation(text: &str) -> String {
        match parse_workspace(text) {
            Err(HarnessError::Validation(m)) => m,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(validation(r#"{"field":{"p":2},"rings":{"R":{"polynomial_ring":{"vars":["y"]}}}}"#).contains("unknown constructor"));
        let cyc = r#"{"field":{"p":2},"rings":{
            "A":{"trivial_extension":{"ring":"B"}},
            "B":{"quotient":{"ring":"A","elements":["e"]}}}}"#;
        assert!(validation(cyc).contains("cycle"));
        let through_module = r#"{"field":{"p":2},
            "rings":{"A":{"trivial_extension":{"ring":"A0","module":"M"}},"A0":{"quotient":{"ring":"A","elements":[]}}},
            "modules":{"M":{"ring":"A0","generators":1}}}"#;
        assert!(validation(through_module).contains("cycle"));
        let dup = r#"{"field":{"p":2},"rings":{"R":{"stock":{"name":"F2_y2"}},"R":{"stock":{"name":"F2_y2"}}}}"#;
        assert!(validation(dup).contains("twice"));
        let clash = r#"{"field":{"p":2},"rings":{"R":{"stock":{"name":"F2_y2"}}},"modules":{"R":{"ring":"F2_y2","generators":1}}}"#;
        assert!(validation(clash).contains("both"));
        assert!(validation(r#"{"field":{"p":2},"rings":{"S":{"quotient":{"ring":"T","elements":[]}}}}"#).contains("unknown ring"));
        assert!(validation(r#"{"format":2,"field":{"p":2}}"#).contains("format"));
        let short = r#"{"field":{"p":2},"modules":{"M":{"ring":"F2_y2","generators":2,"relations":[["y"]]}}}"#;
        assert!(validation(short).contains("entries"));
        let bad_suite = r#"{"field":{"p":2},"suites":{"s":{"suite":"ext-rigidity","bound":3}}}"#;
        assert!(validation(bad_suite).contains("bound"));
    }

    #[test]
    fn parse_errors_have_positions() {
        match parse_workspace("{\"field\": {\"p\": 2,}\n}") {
            Err(HarnessError::Parse { location, .. }) => assert!(location.starts_with("line 1")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_workspace(r#"{"field":{"p":2},"rings":{"R":{"stock":{"nme":"F2_y2"}}}}"#), Err(HarnessError::Parse { .. })));
        assert!(matches!(parse_workspace(r#"{"field":{"p":4}}"#), Err(HarnessError::Core(extlab_core::Error::NotPrime(4)))));
    }

    #[test]
    fn constructions_compose() {
        let ws = parse_workspace(
            r#"{
            "format": 1,
            "field": {"p": 3},
            "rings": {
                "R": {"monomial_quotient": {"vars": ["y", "z"], "ideal": ["y^2", "z^2"]}},
                "Q": {"quotient": {"ring": "R", "elements": ["y*z"]}},
                "E": {"extend": {"ring": "R", "poly": "t^2 + 1"}},
                "RM": {"trivial_extension": {"ring": "R", "module": "M"}},
                "Rk": {"trivial_extension": {"ring": "R", "module": "k"}},
                "P": {"product": {"left": "Q", "right": "Rk"}},
                "B": {"base_change": {"ring": "Q", "degree": 2}},
                "S": {"structure_constants": {"labels": ["1", "w"], "constants": [[0,0,0,1],[0,1,1,1]], "unit": [1, 0]}},
                "T": {"stock": {"name": "F5_y2"}}
            },
            "modules": {"M": {"ring": "R", "generators": 2, "relations": [["y", "-z"], ["z", "0"]]}},
            "poly_modules": {"N": {"ring": "R", "generators": 1, "relations": [["x^2 - y*z + 1"]]}}
        }"#,
        )
        .unwrap();
        let dim = |n: &str| ws.ring(n).unwrap().dim();
        assert_eq!((dim("R"), dim("Q"), dim("E"), dim("Rk"), dim("P"), dim("B"), dim("S"), dim("T")), (4, 3, 8, 5, 8, 3, 2, 2));
        let m = ws.module("M").unwrap();
        assert_eq!(dim("RM"), 4 + m.dim());
        assert_eq!(ws.ring("E").unwrap().residue_degree().unwrap(), 2);
        assert!(!ws.ring("P").unwrap().is_local());
        assert_eq!(ws.ring("B").unwrap().field().order(), 9);
        assert!(ws.ring("S").unwrap().generator("w").is_some());
        assert_eq!(ws.poly_module("N").unwrap().relations().len(), 1);
        assert_eq!(ws.ring("F2_yz2").unwrap().dim(), 3);
        assert!(matches!(ws.ring("nope"), Err(HarnessError::Validation(_))));
    }
}
