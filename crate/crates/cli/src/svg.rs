//! SVG diagrams, drawn only from the JSON artifacts so a saved result
//! renders to the same picture.

use std::fmt::Write;

use cuspidal::moebius::MoebiusMap;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::Value;

const WIDTH: f64 = 800.0;

/// Maps a model-space box onto the canvas, `y` pointing up.
struct Canvas {
    x0: f64,
    y1: f64,
    scale: f64,
    height: f64,
    body: String,
}

impl Canvas {
    fn new((x0, x1): (f64, f64), (y0, y1): (f64, f64)) -> Self {
        let scale = WIDTH / (x1 - x0);
        Canvas {
            x0,
            y1,
            scale,
            height: (y1 - y0) * scale,
            body: String::new(),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.scale, (self.y1 - y) * self.scale)
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, style: &str) {
        let (cx, cy) = self.px(x, y);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.4}" cy="{cy:.4}" r="{:.4}" {style}/>"#,
            r * self.scale
        );
    }

    fn polyline(&mut self, pts: &[[f64; 2]], closed: bool, style: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = self.px(p[0], p[1]);
                format!("{x:.4},{y:.4}")
            })
            .collect();
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = writeln!(self.body, r#"<{tag} points="{}" {style}/>"#, coords.join(" "));
    }

    fn finish(self, title: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{h:.4}\" viewBox=\"0 0 {WIDTH} {h:.4}\">\n\
             <title>{title}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            h = self.height
        )
    }
}

const CIRCLE: &str = r##"fill="#9ecae1" fill-opacity="0.35" stroke="#3182bd" stroke-width="0.8""##;
const CELL: &str = r##"fill="none" stroke="#252525" stroke-width="1.2""##;
const SUMMIT: &str = r##"fill="#e6550d""##;
const MARK: &str = r##"stroke="#e6550d" stroke-width="1""##;

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn pair(v: &Value) -> [f64; 2] {
    [num(&v[0]), num(&v[1])]
}

fn ring_of(doc: &Value) -> Result<u32, String> {
    doc["config"]["ring"]
        .as_u64()
        .map(|d| d as u32)
        .ok_or_else(|| "artifact has no config.ring".to_string())
}

/// Ford circles, cut-locus cells and summits from a `ford` artifact.
pub fn ford(doc: &Value) -> Result<String, String> {
    let modular = ring_of(doc)? == 0;
    let cells = doc["complex"]["cells"].as_array().ok_or("artifact has no complex.cells")?;
    let circles = doc["circles"].as_array().ok_or("artifact has no circles")?;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in cells.iter().flat_map(|c| c["footprint"].as_array().into_iter().flatten()) {
        let [x, y] = pair(p);
        lo = [lo[0].min(x), lo[1].min(y)];
        hi = [hi[0].max(x), hi[1].max(y)];
    }
    let pad = 0.25 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    let xs = (lo[0] - pad, hi[0] + pad);
    let mut canvas = if modular {
        Canvas::new(xs, (-0.05, 1.1))
    } else {
        Canvas::new(xs, (lo[1] - pad, hi[1] + pad))
    };
    for c in circles {
        let [x, y] = pair(&c["center"]);
        let r = num(&c["radius"]);
        if x + r < xs.0 || x - r > xs.1 {
            continue;
        }
        if modular {
            canvas.circle(x, r, r, CIRCLE);
        } else {
            canvas.circle(x, y, r, CIRCLE);
        }
    }
    for cell in cells {
        let foot: Vec<[f64; 2]> = cell["footprint"].as_array().into_iter().flatten().map(pair).collect();
        let summit = &cell["summit"];
        if modular {
            // intervals on the line, with the walls up to the vertex heights
            canvas.polyline(&foot, false, CELL);
            let heights = cell["vertex_heights"].as_array().cloned().unwrap_or_default();
            for (p, h) in foot.iter().zip(&heights) {
                canvas.polyline(&[[p[0], 0.0], [p[0], num(h)]], false, CELL);
            }
            canvas.circle(num(&summit[0]), num(&summit[2]), 3.0 / canvas.scale, SUMMIT);
        } else {
            canvas.polyline(&foot, true, CELL);
            canvas.circle(num(&summit[0]), num(&summit[1]), 3.0 / canvas.scale, SUMMIT);
        }
    }
    Ok(canvas.finish("Ford circles and cut locus"))
}

/// The chain of horoballs met along the descent to ξ, from an `approx` artifact.
pub fn approx(doc: &Value) -> Result<String, String> {
    let modular = ring_of(doc)? == 0;
    let xi = Complex64::new(num(&doc["xi"]["re"]), num(&doc["xi"]["im"]));
    let rows = doc["rows"].as_array().ok_or("artifact has no rows")?;
    let w = 0.6;
    let mut canvas = if modular {
        Canvas::new((xi.re - w, xi.re + w), (-0.05, w))
    } else {
        Canvas::new((xi.re - w, xi.re + w), (xi.im - w, xi.im + w))
    };
    for row in rows {
        let gamma: MoebiusMap = serde_json::from_value(row["gamma"].clone()).map_err(|e| e.to_string())?;
        let z = gamma.endpoint().ok_or("step with c = 0")?.to_complex();
        let r = 0.5 / gamma.c().norm().to_f64().unwrap_or(f64::INFINITY);
        if modular {
            canvas.circle(z.re, r, r, CIRCLE);
        } else {
            canvas.circle(z.re, z.im, r, CIRCLE);
        }
    }
    if modular {
        canvas.polyline(&[[xi.re, 0.0], [xi.re, w]], false, MARK);
        for row in rows {
            canvas.circle(xi.re, num(&row["crossing_t"]), 2.5 / canvas.scale, SUMMIT);
        }
    } else {
        canvas.circle(xi.re, xi.im, 3.0 / canvas.scale, SUMMIT);
    }
    Ok(canvas.finish("Horoball chain along the descent"))
}
