//! Ordering documents:
//! `{"group": {"kind": "free_abelian", "rank": 2}, "ordering": {"type": "flag", "levels": [[…]]}}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactreal::RealConstant;
use crate::groups::{parse_element, GroupRef};
use crate::orderings::{ConjugatedOrdering, Cone, FlagOrdering};

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum OrderingDoc {
    Flag { levels: Vec<Vec<RealConstant>> },
    Dehornoy {},
    Conjugated { base: Box<OrderingDoc>, by: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    group: GroupRef,
    ordering: OrderingDoc,
}

fn build(group: GroupRef, doc: OrderingDoc) -> Result<Cone> {
    match (doc, group) {
        (OrderingDoc::Flag { levels }, GroupRef::FreeAbelian { rank }) => {
            if levels.iter().any(|l| l.len() != rank) {
                return Err(Error::InvalidInput(format!("flag levels must have length {rank}")));
            }
            Ok(Cone::Flag(FlagOrdering::new(levels)?))
        }
        (OrderingDoc::Dehornoy {}, GroupRef::Braid { strands }) => Ok(Cone::dehornoy(strands)),
        (OrderingDoc::Conjugated { base, by }, g) => {
            let base = build(g, *base)?;
            let by = parse_element(&by, g)?;
            Ok(Cone::Conjugated(ConjugatedOrdering { base: Box::new(base), by }))
        }
        (OrderingDoc::Flag { .. }, g) => Err(Error::InvalidInput(format!("flag orderings need a free abelian group, not {g}"))),
        (OrderingDoc::Dehornoy {}, g) => Err(Error::InvalidInput(format!("the Dehornoy ordering needs a braid group, not {g}"))),
    }
}

pub fn parse_ordering(text: &str) -> Result<Cone> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(format!("ordering document: {e}")))?;
    doc.group.validate()?;
    build(doc.group, doc.ordering)
}

fn ordering_value(cone: &Cone) -> Value {
    match cone {
        Cone::Flag(f) => serde_json::json!({"type": "flag", "levels": f.levels()}),
        Cone::Dehornoy(_) => serde_json::json!({"type": "dehornoy"}),
        Cone::Conjugated(c) => serde_json::json!({"type": "conjugated", "base": ordering_value(&c.base), "by": c.by.render()}),
    }
}

#[derive(Serialize)]
struct Out<'a> {
    group: GroupRef,
    ordering: &'a Value,
}

pub fn ordering_to_value(cone: &Cone) -> Value {
    let o = ordering_value(cone);
    serde_json::to_value(Out { group: cone.group(), ordering: &o }).expect("serializable")
}

pub fn emit_ordering(cone: &Cone) -> String {
    serde_json::to_string_pretty(&ordering_to_value(cone)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Element;

    #[test]
    fn parse_examples() {
        let lex = parse_ordering(r#"{"group":{"kind":"free_abelian","rank":2},"ordering":{"type":"flag","levels":[["1","0"],["0","1"]]}}"#).unwrap();
        assert_eq!(lex, Cone::Flag(FlagOrdering::lex(2)));
        let sq = parse_ordering(r#"{"group":{"kind":"free_abelian","rank":2},"ordering":{"type":"flag","levels":[[1,{"2":"1"}]]}}"#).unwrap();
        assert_eq!(sq.as_flag().unwrap().levels()[0][1], RealConstant::sqrt(2));
        let d = parse_ordering(r#"{"group":{"kind":"braid","strands":3},"ordering":{"type":"dehornoy"}}"#).unwrap();
        assert_eq!(d, Cone::dehornoy(3));
        let c = parse_ordering(r#"{"group":{"kind":"braid","strands":3},"ordering":{"type":"conjugated","base":{"type":"dehornoy"},"by":"s1"}}"#).unwrap();
        let g = Element::braid(3, &[2]).unwrap();
        assert_eq!(c.sign(&g).unwrap(), Cone::dehornoy(3).sign(&g.conjugate_by(&Element::braid(3, &[1]).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            r#"{"group":{"kind":"free_abelian","rank":2},"ordering":{"type":"dehornoy"}}"#,
            r#"{"group":{"kind":"braid","strands":3},"ordering":{"type":"flag","levels":[[1,0,0]]}}"#,
            r#"{"group":{"kind":"free_abelian","rank":2},"ordering":{"type":"flag","levels":[[1,1,0]]}}"#,
            r#"{"group":{"kind":"free_abelian","rank":2},"ordering":{"type":"flag","levels":[[1,1]]}}"#,
            r#"{"group":{"kind":"free_abelian","rank":2},"ordering":{"type":"cone"}}"#,
            r#"{"group":{"kind":"braid","strands":1},"ordering":{"type":"dehornoy"}}"#,
            "not json",
        ] {
            assert!(parse_ordering(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip() {
        let docs = [
            r#"{"group":{"kind":"free_abelian","rank":2},"ordering":{"type":"flag","levels":[["3/2",{"1":"-1","2":"1"}]]}}"#,
            r#"{"group":{"kind":"braid","strands":4},"ordering":{"type":"conjugated","base":{"type":"dehornoy"},"by":"s1 s3^-1"}}"#,
        ];
        for d in docs {
            let c = parse_ordering(d).unwrap();
            assert_eq!(parse_ordering(&emit_ordering(&c)).unwrap(), c);
        }
    }
}
