//! JSON wire format for parameters, infinitesimal parameters and traces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use pya_core::duality::{ExtractionTrace, LineDual};
use pya_core::{
    GroupKind, GroupType, HalfInt, InfinitesimalParameter, LParameter, MultiSegment, RhoClass, Segment, SelfDuality,
};

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, DocError> {
    Err(DocError::Schema(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupName {
    #[serde(rename = "GL")]
    Gl,
    #[serde(rename = "SO_odd")]
    SoOdd,
    #[serde(rename = "Sp")]
    Sp,
    #[serde(rename = "O_even")]
    OEven,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    #[serde(rename = "type")]
    pub kind: GroupName,
    pub n: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfDualDoc {
    Orthogonal,
    Symplectic,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoDoc {
    pub label: String,
    pub dim: u32,
    pub selfdual: SelfDualDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegDoc {
    pub rho: String,
    pub b: HalfInt,
    pub e: HalfInt,
    pub mult: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportDoc {
    pub rho: String,
    pub a: HalfInt,
    pub mult: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDoc {
    pub rho: String,
    pub b: HalfInt,
    pub e: HalfInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub line: String,
    pub algorithm: String,
    pub d: HalfInt,
    pub chain: Vec<ChainDoc>,
    pub remainder: Vec<SegDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub group: GroupDoc,
    pub rho_classes: Vec<RhoDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<SupportDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceDoc>>,
}

impl GroupDoc {
    pub fn to_group(&self) -> GroupType {
        let kind = match self.kind {
            GroupName::Gl => GroupKind::Gl,
            GroupName::SoOdd => GroupKind::SoOdd,
            GroupName::Sp => GroupKind::Sp,
            GroupName::OEven => GroupKind::OEven,
        };
        GroupType { kind, n: self.n }
    }

    pub fn from_group(g: &GroupType) -> GroupDoc {
        let kind = match g.kind {
            GroupKind::Gl => GroupName::Gl,
            GroupKind::SoOdd => GroupName::SoOdd,
            GroupKind::Sp => GroupName::Sp,
            GroupKind::OEven => GroupName::OEven,
        };
        GroupDoc { kind, n: g.n }
    }
}

fn rho_doc(r: &RhoClass) -> RhoDoc {
    let (selfdual, dual_label) = match r.selfdual() {
        SelfDuality::Orthogonal => (SelfDualDoc::Orthogonal, None),
        SelfDuality::Symplectic => (SelfDualDoc::Symplectic, None),
        SelfDuality::None => (SelfDualDoc::None, Some(r.dual_label().to_string())),
    };
    RhoDoc { label: r.label().to_string(), dim: r.dim(), selfdual, dual_label }
}

fn seg_docs(m: &MultiSegment) -> Vec<SegDoc> {
    m.iter().map(|(s, k)| SegDoc { rho: s.rho().label().to_string(), b: s.b(), e: s.e(), mult: k }).collect()
}

/// Declared classes by label, with undeclared duals of non-self-dual classes filled in.
pub fn resolve_classes(decls: &[RhoDoc]) -> Result<BTreeMap<String, RhoClass>, DocError> {
    let mut out: BTreeMap<String, RhoClass> = BTreeMap::new();
    for d in decls {
        if out.contains_key(&d.label) {
            return schema(format!("class {:?} declared twice", d.label));
        }
        let rho = match (d.selfdual, &d.dual_label) {
            (SelfDualDoc::None, Some(dl)) => RhoClass::non_self_dual(&d.label, dl, d.dim),
            (SelfDualDoc::None, None) => return schema(format!("non-self-dual class {:?} needs dual_label", d.label)),
            (_, Some(dl)) if *dl != d.label => {
                return schema(format!("self-dual class {:?} has dual_label {dl:?}", d.label))
            }
            (SelfDualDoc::Orthogonal, _) => RhoClass::self_dual(&d.label, d.dim, SelfDuality::Orthogonal),
            (SelfDualDoc::Symplectic, _) => RhoClass::self_dual(&d.label, d.dim, SelfDuality::Symplectic),
        };
        let rho = rho.map_err(|e| DocError::Schema(e.to_string()))?;
        out.insert(d.label.clone(), rho);
    }
    let declared: Vec<RhoClass> = out.values().cloned().collect();
    for rho in declared.iter().filter(|r| !r.is_self_dual()) {
        let dual = rho.dual();
        match out.get(dual.label()) {
            None => {
                out.insert(dual.label().to_string(), dual);
            }
            Some(existing) if *existing != dual => {
                return schema(format!("classes {:?} and {:?} are not declared as a dual pair", rho.label(), dual.label()))
            }
            Some(_) => {}
        }
    }
    Ok(out)
}

fn lookup<'a>(classes: &'a BTreeMap<String, RhoClass>, label: &str) -> Result<&'a RhoClass, DocError> {
    classes.get(label).ok_or_else(|| DocError::Schema(format!("unknown class {label:?}")))
}

fn positive(mult: usize, what: &str) -> Result<(), DocError> {
    if mult == 0 {
        schema(format!("{what} has multiplicity 0"))
    } else {
        Ok(())
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, DocError> {
        Ok(serde_json::from_str(text)?)
    }

    fn multisegment(&self, classes: &BTreeMap<String, RhoClass>) -> Result<Option<MultiSegment>, DocError> {
        let Some(segs) = &self.segments else {
            return Ok(None);
        };
        let mut m = MultiSegment::new();
        for s in segs {
            let rho = lookup(classes, &s.rho)?;
            let seg = Segment::new(rho.clone(), s.b, s.e).map_err(|e| DocError::Schema(e.to_string()))?;
            positive(s.mult, &seg.to_string())?;
            m.insert(seg, s.mult);
        }
        Ok(Some(m))
    }

    /// The parameter; requires `segments`. Validity is not checked here.
    pub fn to_parameter(&self) -> Result<LParameter, DocError> {
        let classes = resolve_classes(&self.rho_classes)?;
        if self.support.is_some() {
            return schema("a parameter document carries segments, not support");
        }
        let m = self.multisegment(&classes)?.ok_or_else(|| DocError::Schema("missing segments".into()))?;
        Ok(LParameter::new(self.group.to_group(), m))
    }

    /// The infinitesimal parameter, from `support` or else from `segments`.
    pub fn to_infinitesimal(&self) -> Result<(GroupType, InfinitesimalParameter), DocError> {
        let classes = resolve_classes(&self.rho_classes)?;
        let lambda = match (&self.support, self.multisegment(&classes)?) {
            (Some(_), Some(_)) => return schema("give either support or segments, not both"),
            (Some(support), None) => {
                let mut lambda = InfinitesimalParameter::default();
                for s in support {
                    positive(s.mult, &format!("exponent {} of {}", s.a, s.rho))?;
                    lambda.insert(lookup(&classes, &s.rho)?.clone(), s.a, s.mult);
                }
                lambda
            }
            (None, Some(m)) => m.infinitesimal(),
            (None, None) => return schema("missing support or segments"),
        };
        Ok((self.group.to_group(), lambda))
    }

    /// Canonical document for `p`, declaring `classes` plus any class `p` uses.
    pub fn from_parameter(p: &LParameter, classes: &[RhoDoc]) -> Document {
        Document {
            group: GroupDoc::from_group(&p.group),
            rho_classes: merged_classes(classes, p.mseg.segments().map(Segment::rho)),
            segments: Some(seg_docs(&p.mseg)),
            support: None,
            trace: None,
        }
    }
}

fn merged_classes<'a>(decls: &[RhoDoc], used: impl Iterator<Item = &'a RhoClass>) -> Vec<RhoDoc> {
    let mut out = decls.to_vec();
    for r in used {
        if !out.iter().any(|d| d.label == r.label()) {
            out.push(rho_doc(r));
        }
    }
    out
}

pub fn trace_docs(lines: &[LineDual]) -> Vec<TraceDoc> {
    let step = |line: &LineDual, s: &ExtractionTrace| TraceDoc {
        line: line.line.to_string(),
        algorithm: serde_json::to_value(line.algorithm).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        d: s.d,
        chain: s.chain.iter().map(|c| ChainDoc { rho: c.rho().label().to_string(), b: c.b(), e: c.e() }).collect(),
        remainder: seg_docs(&s.remainder),
    };
    lines.iter().flat_map(|l| l.steps.iter().map(move |s| step(l, s))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI1: &str = r#"{
        "group": {"type": "SO_odd", "n": 3},
        "rho_classes": [{"label": "1", "dim": 1, "selfdual": "orthogonal"}],
        "segments": [
            {"rho": "1", "b": "0", "e": "1", "mult": 1},
            {"rho": "1", "b": "-1", "e": "0", "mult": 1},
            {"rho": "1", "b": "0", "e": "0", "mult": 2}
        ]
    }"#;

    #[test]
    fn parse_and_roundtrip() {
        let doc = Document::parse(PHI1).unwrap();
        let p = doc.to_parameter().unwrap();
        assert_eq!(p.group, GroupType::so_odd(3));
        assert_eq!(p.mseg.len(), 4);
        assert!(p.validate().is_ok());
        let back = Document::from_parameter(&p, &doc.rho_classes);
        let text = serde_json::to_string(&back).unwrap();
        let again = Document::parse(&text).unwrap();
        assert_eq!(again, back);
        assert_eq!(again.to_parameter().unwrap(), p);
    }

    #[test]
    fn synthesizes_dual_class() {
        let decls = vec![RhoDoc { label: "s".into(), dim: 2, selfdual: SelfDualDoc::None, dual_label: Some("t".into()) }];
        let classes = resolve_classes(&decls).unwrap();
        assert_eq!(classes["t"].dual_label(), "s");
        assert_eq!(classes["t"].dim(), 2);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(Document::parse("{"), Err(DocError::Json(_))));
        let bad_half = PHI1.replace("\"-1\"", "\"1/3\"");
        assert!(matches!(Document::parse(&bad_half), Err(DocError::Json(_))));
        let unknown = PHI1.replace("\"rho\": \"1\", \"b\": \"0\", \"e\": \"1\"", "\"rho\": \"x\", \"b\": \"0\", \"e\": \"1\"");
        assert!(matches!(Document::parse(&unknown).unwrap().to_parameter(), Err(DocError::Schema(_))));
        let zero = PHI1.replace("\"mult\": 2", "\"mult\": 0");
        assert!(matches!(Document::parse(&zero).unwrap().to_parameter(), Err(DocError::Schema(_))));
        let reversed = PHI1.replace("\"b\": \"0\", \"e\": \"1\"", "\"b\": \"1\", \"e\": \"0\"");
        assert!(matches!(Document::parse(&reversed).unwrap().to_parameter(), Err(DocError::Schema(_))));
        let nsd = r#"[{"label": "s", "dim": 1, "selfdual": "none"}]"#;
        let decls: Vec<RhoDoc> = serde_json::from_str(nsd).unwrap();
        assert!(resolve_classes(&decls).is_err());
    }

    #[test]
    fn support_documents() {
        let text = r#"{
            "group": {"type": "GL", "n": 2},
            "rho_classes": [{"label": "1", "dim": 1, "selfdual": "orthogonal"}],
            "support": [{"rho": "1", "a": "1/2", "mult": 1}, {"rho": "1", "a": "-1/2", "mult": 1}]
        }"#;
        let (g, lambda) = Document::parse(text).unwrap().to_infinitesimal().unwrap();
        assert_eq!(g, GroupType::gl(2));
        assert_eq!(lambda.len(), 2);
        let (_, from_segs) = Document::parse(PHI1).unwrap().to_infinitesimal().unwrap();
        assert_eq!(from_segs.len(), 6);
    }
}
