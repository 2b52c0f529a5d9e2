use super::{
    Canvas, ColorStop, CubicBSpline, DiffusionCurve, LaplacianStop, ParseError, PoissonCurve, PoissonRegion,
    PvgDocument, Rgb,
};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentFile {
    version: u32,
    canvas: Canvas,
    #[serde(default)]
    diffusion_curves: Vec<DiffusionCurve>,
    #[serde(default)]
    poisson_curves: Vec<PoissonCurve>,
    #[serde(default)]
    poisson_regions: Vec<PoissonRegion>,
}

/// Parses a `.pvg.json` document and checks every structural invariant.
pub fn parse_document(bytes: &[u8]) -> Result<PvgDocument, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::NotUtf8)?;
    // peek at the version first so a future format reports the right error
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| ParseError::Syntax(e.to_string()))?;
    if let Some(v) = raw.get("version").and_then(|v| v.as_u64()) {
        if v != FORMAT_VERSION as u64 {
            return Err(ParseError::UnknownVersion(v as u32));
        }
    }
    let file: DocumentFile = serde_json::from_value(raw).map_err(|e| ParseError::Syntax(e.to_string()))?;
    let doc = PvgDocument {
        format_version: file.version,
        canvas: file.canvas,
        diffusion_curves: file.diffusion_curves,
        poisson_curves: file.poisson_curves,
        poisson_regions: file.poisson_regions,
    };
    check_structure(&doc)?;
    Ok(doc)
}

/// Canonical serialization: fixed key order, two-space indentation, shortest
/// round-trip decimals, trailing newline.
pub fn serialize_document(doc: &PvgDocument) -> Vec<u8> {
    #[derive(Serialize)]
    struct View<'a> {
        version: u32,
        canvas: &'a Canvas,
        diffusion_curves: &'a [DiffusionCurve],
        poisson_curves: &'a [PoissonCurve],
        poisson_regions: &'a [PoissonRegion],
    }
    let view = View {
        version: doc.format_version,
        canvas: &doc.canvas,
        diffusion_curves: &doc.diffusion_curves,
        poisson_curves: &doc.poisson_curves,
        poisson_regions: &doc.poisson_regions,
    };
    let mut out = serde_json::to_vec_pretty(&view).expect("document values are always serializable");
    out.push(b'\n');
    out
}

fn check_structure(doc: &PvgDocument) -> Result<(), ParseError> {
    if doc.canvas.width == 0 || doc.canvas.height == 0 {
        return Err(ParseError::EmptyCanvas);
    }
    check_color("canvas background", &doc.canvas.background)?;
    for (i, dc) in doc.diffusion_curves.iter().enumerate() {
        let what = format!("diffusion curve #{i}");
        check_spline(&what, &dc.spline)?;
        check_stops(&format!("{what} left colors"), &dc.left_colors, |s: &ColorStop| s.t)?;
        check_stops(&format!("{what} right colors"), &dc.right_colors, |s: &ColorStop| s.t)?;
        for s in dc.left_colors.iter().chain(&dc.right_colors) {
            check_color(&what, &s.color)?;
        }
    }
    for (i, pc) in doc.poisson_curves.iter().enumerate() {
        let what = format!("poisson curve #{i}");
        check_spline(&what, &pc.spline)?;
        check_stops(&what, &pc.laplacian_stops, |s: &LaplacianStop| s.t)?;
        for s in &pc.laplacian_stops {
            check_finite(&what, &s.f_plus)?;
        }
    }
    for (i, pr) in doc.poisson_regions.iter().enumerate() {
        let what = format!("poisson region #{i}");
        check_spline(&what, &pr.boundary)?;
        if !pr.boundary.closed {
            return Err(ParseError::OpenRegionBoundary(i));
        }
        check_finite(&what, &pr.f_outer)?;
        check_finite(&what, &pr.delta_outer)?;
        check_finite(&what, &pr.delta_inner)?;
        if pr.bands == 0 {
            return Err(ParseError::BadValue { what });
        }
    }
    Ok(())
}

fn check_spline(what: &str, s: &CubicBSpline) -> Result<(), ParseError> {
    if s.control_points.len() < 4 {
        return Err(ParseError::TooFewControlPoints {
            what: what.to_string(),
            got: s.control_points.len(),
        });
    }
    if s.control_points.iter().any(|p| !p.is_finite()) {
        return Err(ParseError::BadValue { what: what.to_string() });
    }
    Ok(())
}

fn check_stops<S>(what: &str, stops: &[S], t: impl Fn(&S) -> f64) -> Result<(), ParseError> {
    if stops.is_empty() {
        return Err(ParseError::NoStops { what: what.to_string() });
    }
    let ok_range = stops.iter().all(|s| (0.0..=1.0).contains(&t(s)));
    let increasing = stops.windows(2).all(|w| t(&w[0]) < t(&w[1]));
    if !ok_range || !increasing {
        return Err(ParseError::StopsNotIncreasing { what: what.to_string() });
    }
    Ok(())
}

fn check_finite(what: &str, v: &Rgb) -> Result<(), ParseError> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(ParseError::BadValue { what: what.to_string() })
    }
}

fn check_color(what: &str, v: &Rgb) -> Result<(), ParseError> {
    if v.iter().all(|c| (0.0..=1.0).contains(c)) {
        Ok(())
    } else {
        Err(ParseError::BadValue {
            what: format!("{what} color"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "version": 1,
  "canvas": { "width": 64, "height": 64, "background": [1, 1, 1] },
  "diffusion_curves": [
    {
      "spline": { "control_points": [[8, 8], [56, 8], [56, 56], [8, 56]], "closed": true },
      "left_colors": [{ "t": 0, "color": [1, 0, 0] }],
      "right_colors": [{ "t": 0, "color": [0, 0, 1] }]
    }
  ]
}"#;

    #[test]
    fn minimal_document_parses() {
        let doc = parse_document(MINIMAL.as_bytes()).unwrap();
        assert_eq!(doc.canvas.width, 64);
        assert_eq!(doc.diffusion_curves.len(), 1);
        assert!(doc.poisson_curves.is_empty());
        assert!(doc.poisson_regions.is_empty());
        assert!(doc.canvas.border);
    }

    #[test]
    fn open_region_boundary_is_rejected() {
        let text = r#"{"version":1,"canvas":{"width":8,"height":8,"background":[0,0,0]},
          "poisson_regions":[{"boundary":{"control_points":[[1,1],[5,1],[5,5],[1,5]],"closed":false},
          "f_outer":[0.1,0.1,0.1]}]}"#;
        let err = parse_document(text.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::OpenRegionBoundary(0)));
        assert!(err.to_string().contains("PR boundary must be closed"));
    }

    #[test]
    fn structural_errors() {
        let short = r#"{"version":1,"canvas":{"width":8,"height":8,"background":[0,0,0]},
          "poisson_curves":[{"spline":{"control_points":[[1,1],[5,1],[5,5]],"closed":false},
          "laplacian_stops":[{"t":0,"f_plus":[0,0,0]}]}]}"#;
        assert!(matches!(
            parse_document(short.as_bytes()),
            Err(ParseError::TooFewControlPoints { got: 3, .. })
        ));
        let unsorted = r#"{"version":1,"canvas":{"width":8,"height":8,"background":[0,0,0]},
          "poisson_curves":[{"spline":{"control_points":[[1,1],[5,1],[5,5],[6,6]],"closed":false},
          "laplacian_stops":[{"t":0.5,"f_plus":[0,0,0]},{"t":0.5,"f_plus":[0,0,0]}]}]}"#;
        assert!(matches!(
            parse_document(unsorted.as_bytes()),
            Err(ParseError::StopsNotIncreasing { .. })
        ));
        let future = r#"{"version":7,"canvas":{"width":8,"height":8,"background":[0,0,0]}}"#;
        assert!(matches!(parse_document(future.as_bytes()), Err(ParseError::UnknownVersion(7))));
        assert!(matches!(parse_document(b"{not json"), Err(ParseError::Syntax(_))));
        assert!(matches!(parse_document(&[0xff, 0xfe]), Err(ParseError::NotUtf8)));
        let extra = r#"{"version":1,"canvas":{"width":8,"height":8,"background":[0,0,0]},"layers":[]}"#;
        assert!(matches!(parse_document(extra.as_bytes()), Err(ParseError::Syntax(_))));
    }

    #[test]
    fn serialization_is_canonical() {
        let doc = parse_document(MINIMAL.as_bytes()).unwrap();
        let a = serialize_document(&doc);
        let b = serialize_document(&doc);
        assert_eq!(a, b);
        let again = parse_document(&a).unwrap();
        assert_eq!(again, doc);
        assert_eq!(serialize_document(&again), a);
    }

    #[test]
    fn laplacian_values_survive_decimal_round_trip() {
        let mut doc = parse_document(MINIMAL.as_bytes()).unwrap();
        for k in [1.0, 2.0, 0.5, 1.0 / 3.0] {
            let v = 41.0 / 255.0 * k;
            doc.poisson_curves = vec![PoissonCurve {
                spline: CubicBSpline {
                    control_points: vec![[20.0, 32.0].into(), [28.0, 30.0].into(), [36.0, 34.0].into(), [44.0, 32.0].into()],
                    closed: false,
                },
                laplacian_stops: vec![LaplacianStop { t: 0.0, f_plus: [v, -v, v * 0.1] }],
            }];
            let back = parse_document(&serialize_document(&doc)).unwrap();
            assert_eq!(back.poisson_curves[0].laplacian_stops[0].f_plus, [v, -v, v * 0.1]);
        }
    }
}
