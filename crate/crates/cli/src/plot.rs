//! Deterministic SVG rendering of sweep results.
//!
//! The chart draws up to three series against the key column — initial
//! coherence (when present), discord, and final coherence — as polylines
//! with point markers, a legend, and labeled axes. Identical input bytes
//! produce identical SVG bytes.

use qcycle::fmt::format_significant;

use crate::errors::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 780.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 460.0;

struct Series {
    name: &'static str,
    color: &'static str,
    dash: Option<&'static str>,
    values: Vec<f64>,
}

/// Render a sweep CSV (schema `key,...` with `discord` and `c_final`
/// columns, optionally `c_initial`) as a standalone SVG document.
pub fn render_svg(csv: &str) -> Result<String, CliError> {
    let mut lines = csv.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime("empty plot input"))?;
    let columns: Vec<&str> = header.split(',').collect();
    let column = |name: &str| columns.iter().position(|&c| c == name);
    let discord_col = column("discord")
        .ok_or_else(|| CliError::runtime("plot input is missing a \"discord\" column"))?;
    let c_final_col = column("c_final")
        .ok_or_else(|| CliError::runtime("plot input is missing a \"c_final\" column"))?;
    let c_initial_col = column("c_initial");

    let mut keys: Vec<f64> = Vec::new();
    let mut series: Vec<Series> = Vec::new();
    if c_initial_col.is_some() {
        series.push(Series {
            name: "c_initial",
            color: "#7f7f7f",
            dash: Some("6 4"),
            values: Vec::new(),
        });
    }
    series.push(Series {
        name: "discord",
        color: "#1f77b4",
        dash: None,
        values: Vec::new(),
    });
    series.push(Series {
        name: "c_final",
        color: "#d62728",
        dash: None,
        values: Vec::new(),
    });

    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(CliError::runtime(format!(
                "line {}: expected {} fields, got {}",
                lineno + 2,
                columns.len(),
                fields.len()
            )));
        }
        let parse = |i: usize| -> Result<f64, CliError> {
            fields[i].parse().map_err(|_| {
                CliError::runtime(format!("line {}: bad number {:?}", lineno + 2, fields[i]))
            })
        };
        keys.push(parse(0)?);
        let mut slot = 0;
        if let Some(i) = c_initial_col {
            series[slot].values.push(parse(i)?);
            slot += 1;
        }
        series[slot].values.push(parse(discord_col)?);
        series[slot + 1].values.push(parse(c_final_col)?);
    }
    if keys.is_empty() {
        return Err(CliError::runtime("plot input has no data rows"));
    }

    let key_label = columns[0];
    let x_min = keys.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = keys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let x_span = (x_max - x_min).max(1e-9);
    let y_max = series
        .iter()
        .flat_map(|s| s.values.iter().cloned())
        .fold(1.0f64, f64::max)
        * 1.05;
    let x_of = |key: f64| LEFT + (key - x_min) / x_span * (RIGHT - LEFT);
    let y_of = |value: f64| BOTTOM - value / y_max * (BOTTOM - TOP);
    let six = |v: f64| format_significant(v, 6);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));

    // Horizontal grid and y-axis ticks.
    for tick in 0..=4 {
        let value = tick as f64 * 0.25;
        let y = six(y_of(value));
        svg.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{y}\" x2=\"{RIGHT}\" y2=\"{y}\" stroke=\"#dddddd\" \
             stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#333333\" \
             text-anchor=\"end\">{}</text>\n",
            six(LEFT - 8.0),
            six(y_of(value) + 4.0),
            six(value)
        ));
    }
    // X ticks at each data key.
    for &key in &keys {
        let x = six(x_of(key));
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{BOTTOM}\" x2=\"{x}\" y2=\"{}\" stroke=\"#333333\" \
             stroke-width=\"1\"/>\n",
            six(BOTTOM + 5.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" font-size=\"11\" fill=\"#333333\" \
             text-anchor=\"middle\">{}</text>\n",
            six(BOTTOM + 20.0),
            six(key)
        ));
    }
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" \
         stroke=\"#333333\" stroke-width=\"1.5\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" \
         stroke=\"#333333\" stroke-width=\"1.5\"/>\n"
    ));
    // Axis labels.
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#333333\" \
         text-anchor=\"middle\">{key_label}</text>\n",
        six((LEFT + RIGHT) / 2.0),
        six(HEIGHT - 12.0)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-size=\"13\" fill=\"#333333\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {})\">bits</text>\n",
        six((TOP + BOTTOM) / 2.0),
        six((TOP + BOTTOM) / 2.0)
    ));

    // Series polylines and markers.
    for s in &series {
        let points: Vec<String> = keys
            .iter()
            .zip(&s.values)
            .map(|(&k, &v)| format!("{},{}", six(x_of(k)), six(y_of(v))))
            .collect();
        let dash = s
            .dash
            .map(|d| format!(" stroke-dasharray=\"{d}\""))
            .unwrap_or_default();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{} points=\"{}\"/>\n",
            s.color,
            dash,
            points.join(" ")
        ));
        for point in &points {
            let (x, y) = point.split_once(',').expect("formatted as x,y");
            svg.push_str(&format!(
                "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{}\"/>\n",
                s.color
            ));
        }
    }

    // Legend (top right, inside the plot box).
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 18.0 * i as f64;
        let dash = s
            .dash
            .map(|d| format!(" stroke-dasharray=\"{d}\""))
            .unwrap_or_default();
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
            six(RIGHT - 140.0),
            six(y),
            six(RIGHT - 110.0),
            six(y),
            s.color,
            dash
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#333333\">{}</text>\n",
            six(RIGHT - 102.0),
            six(y + 4.0),
            s.name
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
