use std::io::Write;

use liquidity_core::indicators::IndicatorOptions;
use liquidity_core::ingest::{load_csv, Field, RejectReason, COLUMNS};

fn write_temp(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

fn header() -> String {
    COLUMNS.join(",")
}

#[test]
fn mixed_file_keeps_good_rows_and_explains_bad_ones() {
    let body = format!(
        "{}\n\
         a,2009,health,100,50,20,30,5,10,10,20,5,4,6,1\n\
         b,2009,health,\"1,5\",50,20,30,5,10,10,20,5,4,6,1\n\
         c,1850,health,100,50,20,30,5,10,10,20,5,4,6,1\n\
         a,2009,charity,100,50,20,30,5,10,10,20,5,4,6,1\n\
         ,2010,health,100,50,20,30,5,10,10,20,5,4,6,1\n\
         d,2010,,100,50,20,30,5,10,10,20,5,4,6,1\n\
         e,2010,x,100\n",
        header()
    );
    let f = write_temp(&body);
    let ds = load_csv(f.path()).unwrap();
    assert_eq!(ds.provenance.total_rows, 7);
    assert_eq!(ds.provenance.accepted, 2);
    assert_eq!(ds.provenance.rejected, 5);
    assert_eq!(ds.records.iter().map(|r| r.org_id.as_str()).collect::<Vec<_>>(), ["a", "d"]);
    // first occurrence wins
    assert!(ds.records[0].sectors.contains("health"));
    assert!(ds.records[1].sectors.is_empty());

    let reasons: Vec<(usize, &RejectReason)> = ds.rejects.iter().map(|r| (r.row, &r.reason)).collect();
    assert!(matches!(reasons[0], (2, RejectReason::CommaDecimal { column: "cash_revenues", .. })));
    assert!(matches!(reasons[1], (3, RejectReason::YearOutOfRange { year: 1850 })));
    assert!(matches!(reasons[2], (4, RejectReason::DuplicateKey { .. })));
    assert!(matches!(reasons[3], (5, RejectReason::EmptyKey { .. })));
    assert!(matches!(reasons[4], (7, RejectReason::FieldCount { .. })));

    // the rejects serialize for machine consumption
    let json = serde_json::to_value(&ds.rejects).unwrap();
    assert_eq!(json[0]["reason"]["kind"], "comma-decimal");
    assert_eq!(json[1]["row"], 3);
}

#[test]
fn missing_required_column_fails_the_whole_file() {
    let body = "org_id,year,sectors,cash_revenues\na,2009,x,1\n";
    let f = write_temp(body);
    let err = load_csv(f.path()).unwrap_err();
    assert!(!err.is_io());
    assert!(err.to_string().contains("total_assets"), "{err}");
}

#[test]
fn write_then_load_through_a_file() {
    let src = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/stats_small.csv");
    let ds = load_csv(&src).unwrap();
    let out = tempfile::NamedTempFile::new().unwrap();
    ds.write_csv(std::fs::File::create(out.path()).unwrap()).unwrap();
    let back = load_csv(out.path()).unwrap();
    assert_eq!(back.records, ds.records);
    let opts = IndicatorOptions::default();
    for field in Field::ALL {
        assert_eq!(back.column(field, &opts), ds.column(field, &opts), "{field}");
    }
}

#[test]
fn bom_and_crlf_are_tolerated() {
    let body = format!("\u{feff}{}\r\na,2009,health,100,50,20,30,5,10,10,20,5,4,6,1\r\n", header());
    let f = write_temp(&body);
    let ds = load_csv(f.path()).unwrap();
    assert_eq!(ds.records.len(), 1, "{:?}", ds.rejects);
}
