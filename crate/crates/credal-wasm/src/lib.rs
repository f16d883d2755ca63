//! Browser bindings: every function takes an assessment document as a JSON
//! string and returns a JSON string with an `ok` flag, so the page never
//! has to deal with exceptions. The heavy lifting happens in plain
//! functions that compile and test on any target; the `#[wasm_bindgen]`
//! wrappers only forward strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use credal::cone::normal_cone_basis;
use credal::distance::normed_distance;
use credal::extension::check_on;
use credal::io::parse_assessment;
use credal::maxdist::{maximal_distance_on, prepare, MaxDistOptions};
use credal::polytope::CredalSet;
use credal::Tolerances;

fn err(msg: impl std::fmt::Display) -> Value {
    json!({ "ok": false, "error": msg.to_string() })
}

fn masses(cs: &CredalSet) -> Vec<Vec<f64>> {
    cs.vertices().iter().map(|p| p.mass().to_vec()).collect()
}

/// Vertices, incidence and coherence of the credal set, for drawing.
///
/// Vertex indices agree with the other two entry points: preparation only
/// rewrites constraint rows, never the vertex list.
pub fn analyze_impl(doc_json: &str) -> Value {
    let (doc, assessment) = match parse_assessment(doc_json, false) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let tol = Tolerances::DEFAULT;
    let cs = CredalSet::from_assessment(&assessment, &tol);
    if cs.is_empty() {
        return json!({
            "ok": true,
            "space_size": assessment.space_size(),
            "sure_loss": true,
            "coherent": false,
            "vertices": Vec::<Vec<f64>>::new(),
            "faces": Vec::<Value>::new(),
        });
    }
    let report = check_on(&assessment, &cs, &tol);
    let faces: Vec<Value> = cs
        .original_rows()
        .iter()
        .enumerate()
        .map(|(pos, &row)| {
            let face = cs.face(row).expect("row in range");
            json!({
                "row": row,
                "label": doc.gamble_name(pos),
                "vertices": face.vertex_indices,
            })
        })
        .collect();
    json!({
        "ok": true,
        "space_size": assessment.space_size(),
        "sure_loss": false,
        "coherent": report.coherent,
        "slacks": report.slack_per_item,
        "vertices": masses(&cs),
        "faces": faces,
    })
}

/// Normed and Euclidean distance between two vertices, with the witness
/// gamble and the cone basis used.
pub fn vertex_distance_impl(doc_json: &str, from: usize, to: usize) -> Value {
    let (_, assessment) = match parse_assessment(doc_json, false) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let prepared = match prepare(&assessment, &Tolerances::DEFAULT) {
        Ok(p) => p,
        Err(e) => return err(e),
    };
    let cs = &prepared.credal;
    let v = cs.vertices().len();
    if from >= v || to >= v {
        return err(format!("vertex index out of range (have {v} vertices)"));
    }
    let basis = match normal_cone_basis(cs, from) {
        Ok(b) => b,
        Err(e) => return err(e),
    };
    let e = &cs.vertices()[from];
    let p = &cs.vertices()[to];
    let res = normed_distance(&basis, e, p);
    let unit_witness = if res.distance > 0.0 {
        let n = res.witness.norm();
        res.witness.scaled(1.0 / n).values().to_vec()
    } else {
        Vec::new()
    };
    json!({
        "ok": true,
        "corrected": prepared.corrected,
        "from": from,
        "to": to,
        "normed_distance": res.distance,
        "euclidean_distance": e.euclidean_distance(p),
        "witness": unit_witness,
        "alpha": res.alpha,
        "basis_rows": basis.row_indices,
        "vertices": masses(cs),
    })
}

/// The worst-case bound with witnesses and counters.
pub fn max_distance_impl(doc_json: &str) -> Value {
    let (_, assessment) = match parse_assessment(doc_json, false) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let prepared = match prepare(&assessment, &Tolerances::DEFAULT) {
        Ok(p) => p,
        Err(e) => return err(e),
    };
    let report = match maximal_distance_on(&prepared, &MaxDistOptions::default()) {
        Ok(r) => r,
        Err(e) => return err(e),
    };
    let witness = report.witness.as_ref().map(|w| {
        json!({
            "vertex": w.vertex,
            "face_row": w.face_row,
            "far_vertex": w.far_vertex,
            "gamble": w.gamble.values(),
        })
    });
    json!({
        "ok": true,
        "corrected": report.corrected,
        "max_distance": report.max_distance,
        "witness": witness,
        "per_vertex": report
            .per_vertex
            .iter()
            .map(|p| json!({ "vertex": p.vertex, "min_over_faces": p.min_over_faces }))
            .collect::<Vec<_>>(),
        "qp_calls": report.counters.qp_calls,
        "distances_needed": report.counters.distances_needed,
        "dominance_skips": report.counters.dominance_skips,
        "vertices": masses(&prepared.credal),
    })
}

#[wasm_bindgen]
pub fn analyze(doc_json: &str) -> String {
    analyze_impl(doc_json).to_string()
}

#[wasm_bindgen]
pub fn vertex_distance(doc_json: &str, from: usize, to: usize) -> String {
    vertex_distance_impl(doc_json, from, to).to_string()
}

#[wasm_bindgen]
pub fn max_distance(doc_json: &str) -> String {
    max_distance_impl(doc_json).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "space_size": 3,
        "gambles": [
            { "values": [0.0, 1.0, 0.5], "lower": 0.46 },
            { "values": [0.0, 0.5, 1.0], "lower": 0.4 },
            { "values": [0.15, 0.0, 1.0], "lower": 0.25 },
            { "values": [1.0, 0.0, 0.6], "lower": 0.44 },
            { "values": [0.2, 1.0, 0.0], "lower": 0.4 }
        ]
    }"#;

    #[test]
    fn analyze_reports_pentagon() {
        let v = analyze_impl(SAMPLE);
        assert_eq!(v["ok"], true);
        assert_eq!(v["coherent"], true);
        assert_eq!(v["vertices"].as_array().unwrap().len(), 5);
        assert_eq!(v["faces"].as_array().unwrap().len(), 5);
        for f in v["faces"].as_array().unwrap() {
            assert_eq!(f["vertices"].as_array().unwrap().len(), 2, "pentagon edges");
        }
    }

    #[test]
    fn analyze_flags_sure_loss() {
        let doc = r#"{ "space_size": 2, "gambles": [
            { "values": [1.0, 0.0], "lower": 0.5 },
            { "values": [-1.0, 0.0], "lower": -0.3 }
        ] }"#;
        let v = analyze_impl(doc);
        assert_eq!(v["ok"], true);
        assert_eq!(v["sure_loss"], true);
    }

    #[test]
    fn parse_errors_are_reported_not_thrown() {
        let v = analyze_impl("{ not json");
        assert_eq!(v["ok"], false);
        assert!(v["error"].as_str().unwrap().contains("parse error"));
    }

    #[test]
    fn vertex_distance_matches_reference_pair() {
        let v = analyze_impl(SAMPLE);
        let verts = v["vertices"].as_array().unwrap();
        let find = |t: [f64; 3]| {
            verts
                .iter()
                .position(|p| {
                    p.as_array()
                        .unwrap()
                        .iter()
                        .zip(t.iter())
                        .all(|(a, b)| (a.as_f64().unwrap() - b).abs() < 5e-3)
                })
                .unwrap()
        };
        let e1 = find([0.40, 0.32, 0.28]);
        let e5 = find([0.15, 0.37, 0.48]);
        let d = vertex_distance_impl(SAMPLE, e1, e5);
        assert_eq!(d["ok"], true);
        assert!((d["normed_distance"].as_f64().unwrap() - 0.2089).abs() < 1e-3);
        assert!((d["euclidean_distance"].as_f64().unwrap() - 0.3191).abs() < 1e-3);
        let bad = vertex_distance_impl(SAMPLE, 0, 99);
        assert_eq!(bad["ok"], false);
    }

    #[test]
    fn max_distance_reports_witness() {
        let v = max_distance_impl(SAMPLE);
        assert_eq!(v["ok"], true);
        assert!((v["max_distance"].as_f64().unwrap() - 0.319052).abs() < 1e-4);
        assert!(v["witness"].is_object());
        assert_eq!(v["per_vertex"].as_array().unwrap().len(), 5);
    }
}
