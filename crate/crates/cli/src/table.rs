//! Two-column rendering of a JSON document: one row per scalar leaf, keyed
//! by its path. Arrays of scalars stay on one row.

use serde_json::Value;

pub fn render(doc: &Value) -> String {
    let mut rows = Vec::new();
    flatten(doc, String::new(), &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (key, value) in rows {
        out.push_str(&format!("{key:<width$}  {value}\n"));
    }
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items
                .iter()
                .map(|i| match i {
                    Value::Array(_) | Value::Object(_) => None,
                    other => scalar(other),
                })
                .collect();
            parts.map(|p| format!("({})", p.join(", ")))
        }
        Value::Object(_) => None,
    }
}

fn flatten(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        rows.push((
            if path.is_empty() {
                "value".into()
            } else {
                path
            },
            s,
        ));
        return;
    }
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                rows.push((path.clone(), "()".into()));
            }
            for (i, item) in items.iter().enumerate() {
                flatten(item, format!("{path}[{i}]"), rows);
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                rows.push((path.clone(), "{}".into()));
            }
            for (k, item) in map {
                let key = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                flatten(item, key, rows);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rows_follow_paths() {
        let doc = json!({"polygon": {"vertices": [["0", "1"], ["1", "0"]]}, "pass": true});
        assert_eq!(
            render(&doc),
            "pass                 true\npolygon.vertices[0]  (0, 1)\npolygon.vertices[1]  (1, 0)\n"
        );
    }

    #[test]
    fn scalar_documents() {
        assert_eq!(render(&json!([1, 2])), "value  (1, 2)\n");
    }
}
