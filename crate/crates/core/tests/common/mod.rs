use serde_json::Value;

use segre_core::induction::Certificate;

/// Every certificate obtained by changing one side-condition number by one,
/// one witness count by one, or one table id. Seeds are left alone: a witness
/// at another seed is still a witness if it reaches the target.
pub fn single_edits(cert: &Certificate) -> Vec<(String, Certificate)> {
    let root = serde_json::to_value(cert).expect("certificate serializes");
    let mut out = Vec::new();
    collect(&root, &root["node"], "node", &mut Vec::new(), &mut out);
    out
}

fn collect(root: &Value, node: &Value, path: &str, ptr: &mut Vec<String>, out: &mut Vec<(String, Certificate)>) {
    if let Some(sc) = node.get("side_conditions") {
        let mut leaves = Vec::new();
        numeric_leaves(sc, &mut vec!["side_conditions".into()], &mut leaves);
        for leaf in leaves {
            push_edits(root, ptr, &leaf, path, out);
        }
    }
    if node.get("witness").is_some() {
        for f in ["prime", "rows", "cols", "rank", "target"] {
            push_edits(root, ptr, &["witness".to_string(), f.to_string()], path, out);
        }
    }
    if let Some(Value::String(id)) = node.get("table_id") {
        let mut v = root.clone();
        *locate(&mut v, ptr, &["table_id".to_string()]) = Value::String(format!("{id}x"));
        if let Ok(c) = serde_json::from_value(v) {
            out.push((format!("{path}.table_id"), c));
        }
    }
    if let Some(Value::Array(kids)) = node.get("children") {
        for (i, kid) in kids.iter().enumerate() {
            ptr.push("children".into());
            ptr.push(i.to_string());
            collect(root, kid, &format!("{path}.children[{i}]"), ptr, out);
            ptr.pop();
            ptr.pop();
        }
    }
}

fn numeric_leaves(v: &Value, at: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Number(_) => out.push(at.clone()),
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                at.push(i.to_string());
                numeric_leaves(x, at, out);
                at.pop();
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                at.push(k.clone());
                numeric_leaves(x, at, out);
                at.pop();
            }
        }
        _ => {}
    }
}

fn locate<'a>(root: &'a mut Value, ptr: &[String], tail: &[String]) -> &'a mut Value {
    let mut cur = &mut root["node"];
    for key in ptr.iter().chain(tail) {
        cur = match cur {
            Value::Array(xs) => &mut xs[key.parse::<usize>().expect("index")],
            other => &mut other[key.as_str()],
        };
    }
    cur
}

fn push_edits(root: &Value, ptr: &[String], tail: &[String], path: &str, out: &mut Vec<(String, Certificate)>) {
    let x = {
        let mut probe = root.clone();
        locate(&mut probe, ptr, tail).as_u64().expect("non-negative integer")
    };
    for y in [x.checked_add(1), x.checked_sub(1)].into_iter().flatten() {
        let mut v = root.clone();
        *locate(&mut v, ptr, tail) = Value::from(y);
        if let Ok(c) = serde_json::from_value::<Certificate>(v) {
            out.push((format!("{path}.{} {x}->{y}", tail.join(".")), c));
        }
    }
}
