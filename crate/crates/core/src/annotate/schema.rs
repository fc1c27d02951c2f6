//! Registered output schemas and response parsing.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Identifier of the entity-list schema.
pub const ENTITY_LIST_SCHEMA: &str = "entity_list_v1";

/// One entity as returned by an annotator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub text: String,
    #[serde(rename = "type")]
    pub entity_type: String,
}

/// JSON schema registered under `id`.
pub fn schema(id: &str) -> Option<Value> {
    match id {
        ENTITY_LIST_SCHEMA => Some(json!({
            "type": "object",
            "properties": {
                "entities": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "text": { "type": "string" },
                            "type": { "type": "string" }
                        },
                        "required": ["text", "type"],
                        "additionalProperties": false
                    }
                }
            },
            "required": ["entities"],
            "additionalProperties": false
        })),
        _ => None,
    }
}

/// Parses a raw model response against the entity-list schema.
///
/// Both the schema's object form `{"entities": [...]}` and a bare array are
/// accepted; every item must have exactly the string fields `text` and `type`.
/// Markdown code fences around the JSON are tolerated.
pub fn parse_entities(raw: &str) -> Result<Vec<Entity>, String> {
    let body = strip_fence(raw.trim());
    let value: Value = serde_json::from_str(body).map_err(|e| format!("invalid JSON: {e}"))?;
    let items = match &value {
        Value::Array(items) => items,
        Value::Object(map) => {
            if map.len() != 1 {
                return Err("object root must have exactly the key \"entities\"".into());
            }
            match map.get("entities") {
                Some(Value::Array(items)) => items,
                _ => return Err("\"entities\" must be an array".into()),
            }
        }
        _ => return Err("root must be an object or an array".into()),
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let obj = item.as_object().ok_or_else(|| format!("entity {i} is not an object"))?;
            if obj.len() != 2 {
                return Err(format!("entity {i} must have exactly the fields text and type"));
            }
            let field = |name: &str| {
                obj.get(name).and_then(Value::as_str).map(str::to_string).ok_or_else(|| format!("entity {i}: missing string field {name:?}"))
            };
            Ok(Entity { text: field("text")?, entity_type: field("type")? })
        })
        .collect()
}

fn strip_fence(s: &str) -> &str {
    let Some(rest) = s.strip_prefix("```") else {
        return s;
    };
    let rest = rest.strip_prefix("json").unwrap_or(rest);
    rest.strip_suffix("```").unwrap_or(rest).trim()
}

/// Canonical serialization of an entity list in the schema's object form.
pub fn entities_json(entities: &[Entity]) -> String {
    serde_json::to_string(&json!({ "entities": entities })).expect("entities serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_object_and_array_roots() {
        let want = vec![Entity { text: "aspirin".into(), entity_type: "drug".into() }];
        assert_eq!(parse_entities(r#"{"entities":[{"text":"aspirin","type":"drug"}]}"#).unwrap(), want);
        assert_eq!(parse_entities(r#"[{"type":"drug","text":"aspirin"}]"#).unwrap(), want);
        assert_eq!(parse_entities("```json\n[{\"text\":\"aspirin\",\"type\":\"drug\"}]\n```").unwrap(), want);
        assert_eq!(parse_entities(&entities_json(&want)).unwrap(), want);
        assert!(parse_entities("[]").unwrap().is_empty());
    }

    #[test]
    fn rejects_schema_violations() {
        for raw in [
            "not json",
            "{\"entities\": {}}",
            "{\"items\": []}",
            "[{\"text\": \"a\"}]",
            "[{\"text\": \"a\", \"type\": 3}]",
            "[{\"text\": \"a\", \"type\": \"b\", \"score\": 1}]",
            "42",
        ] {
            assert!(parse_entities(raw).is_err(), "{raw}");
        }
    }

    #[test]
    fn registry() {
        assert!(schema(ENTITY_LIST_SCHEMA).is_some());
        assert!(schema("nope").is_none());
    }
}
