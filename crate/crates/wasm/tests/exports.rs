use serde_json::Value;
use tailind_wasm::{calibration_json, coupling_json, panel_json};

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn calibration_grid() {
    let v = parse(calibration_json(0.1, 0.05, 100, 6.0, 6));
    assert_eq!(v["alpha"], 0.225);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5]["p"], 1e6);
    let t_min = rows[5]["t_min"].as_f64().unwrap();
    assert!((t_min - 1.05 * (2.0 * 1e6f64.ln() / 1.225).sqrt()).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[0]["t_min"].as_f64() < w[1]["t_min"].as_f64()));
    assert!(calibration_json(1.0, 0.05, 100, 6.0, 6).is_err());
}

#[test]
fn panel_view() {
    let v = parse(panel_json(2000, 50, 3, 0.2, 0.0, 0.0, 4));
    let t = v["t"].as_array().unwrap();
    assert_eq!(t.len(), 2000);
    let level = v["t_level"].as_f64().unwrap();
    for i in v["exceedances"].as_array().unwrap() {
        assert!(t[i.as_u64().unwrap() as usize].as_f64().unwrap() > level);
    }
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks[0]["start"], 0);
    assert_eq!(blocks.last().unwrap()["end"], 2000);
    assert_eq!(panel_json(2000, 50, 3, 0.2, 0.0, 0.0, 4).unwrap(), panel_json(2000, 50, 3, 0.2, 0.0, 0.0, 4).unwrap());
    let explicit = parse(panel_json(2000, 50, 3, 0.2, 0.0, 2.5, 4));
    assert_eq!(explicit["t_level"], 2.5);
    assert!(explicit["exceedances"].as_array().unwrap().len() >= v["exceedances"].as_array().unwrap().len());
    assert!(panel_json(0, 50, 3, 0.2, 0.0, 0.0, 4).is_err());
    assert!(panel_json(100, 50, 2, 0.5, 0.0, 0.0, 4).is_err());
}

#[test]
fn coupling_view() {
    let v = parse(coupling_json("0.1, 0.2, 0.05", "0.12,0.2,0.04", 20_000, 1));
    assert_eq!(v["m"], 3);
    assert!((v["bound"].as_f64().unwrap() - 0.97).abs() < 1e-12);
    assert!(v["realized"].as_f64().unwrap() >= 0.97 - 3.0 * v["realized_se"].as_f64().unwrap());
    assert!(coupling_json("0.1", "0.1,0.2", 10, 1).is_err());
    assert!(coupling_json("0.1,x", "0.1,0.2", 10, 1).is_err());
}
