//! Gantt charts: one row per resource, one bar per task.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, ResourceId, Schedule, TaskId, Time};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GanttFormat {
    #[default]
    Text,
    Svg,
}

/// Widest text timeline, in columns.
const MAX_COLUMNS: i64 = 120;
const SVG_UNIT: i64 = 12;
const SVG_ROW: i64 = 28;
const SVG_LABEL: i64 = 64;
const SVG_TOP: i64 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Bar {
    task: TaskId,
    start: Time,
    end: Time,
}

fn rows(schedule: &Schedule, instance: &Instance) -> Vec<(ResourceId, Vec<Bar>)> {
    instance
        .resource_ids()
        .map(|res| {
            let mut bars: Vec<Bar> = schedule
                .starts()
                .iter()
                .filter_map(|(&id, &start)| {
                    let task = instance.task(id)?;
                    task.resources().contains(&res).then(|| Bar {
                        task: id,
                        start,
                        end: task.completion_time(start),
                    })
                })
                .collect();
            bars.sort_by_key(|b| (b.start, b.task));
            (res, bars)
        })
        .collect()
}

fn label(task: TaskId) -> String {
    format!("J^{}_{}", task.plan.0, task.index)
}

/// Renders `schedule` as a fixed-width text chart or an SVG document.
/// Output depends only on the inputs. A schedule with no placed task gives
/// the header alone.
pub fn render_gantt(schedule: &Schedule, instance: &Instance, format: GanttFormat) -> String {
    match format {
        GanttFormat::Text => render_text(schedule, instance),
        GanttFormat::Svg => render_svg(schedule, instance),
    }
}

fn render_text(schedule: &Schedule, instance: &Instance) -> String {
    let window = instance.window();
    let span = window.len().max(1);
    let unit = (span + MAX_COLUMNS - 1) / MAX_COLUMNS;
    let columns = ((span + unit - 1) / unit) as usize;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "gantt window [{}, {}] unit {}",
        window.start(),
        window.end(),
        unit
    );
    if schedule.starts().is_empty() {
        return out;
    }

    let rows = rows(schedule, instance);
    let name_width = rows
        .iter()
        .map(|(r, _)| r.to_string().len())
        .max()
        .unwrap_or(0);

    let mut axis = vec![b' '; columns + 24];
    for tick in (0..=columns).step_by(10) {
        let text = (window.start() + tick as i64 * unit).to_string();
        axis[tick..tick + text.len()].copy_from_slice(text.as_bytes());
    }
    let _ = writeln!(
        out,
        "{:name_width$}  {}",
        "",
        String::from_utf8_lossy(&axis).trim_end()
    );

    for (res, bars) in rows {
        let mut line = vec![b'.'; columns];
        for (n, bar) in bars.iter().enumerate() {
            let fill = if n % 2 == 0 { b'#' } else { b'=' };
            let from = ((bar.start - window.start()) / unit).max(0) as usize;
            let to = ((bar.end - window.start() + unit - 1) / unit).max(0) as usize;
            for cell in line.iter_mut().take(to.min(columns)).skip(from) {
                *cell = fill;
            }
        }
        let listing: Vec<String> = bars
            .iter()
            .map(|b| format!("{} [{},{})", label(b.task), b.start, b.end))
            .collect();
        let _ = writeln!(
            out,
            "{:name_width$} |{}|  {}",
            res.to_string(),
            String::from_utf8_lossy(&line),
            listing.join("  ")
        );
    }
    out.lines()
        .map(str::trim_end)
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        })
}

fn render_svg(schedule: &Schedule, instance: &Instance) -> String {
    let window = instance.window();
    let span = window.len().max(1);
    let placed = !schedule.starts().is_empty();
    let rows = if placed {
        rows(schedule, instance)
    } else {
        Vec::new()
    };
    let width = SVG_LABEL + span * SVG_UNIT + 16;
    let height = SVG_TOP + rows.len() as i64 * SVG_ROW + 16;
    let x_of = |t: Time| SVG_LABEL + (t - window.start()) * SVG_UNIT;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="4" y="14">gantt window [{}, {}]</text>"#,
        window.start(),
        window.end()
    );
    if placed {
        let step = ((span + 19) / 20).max(1);
        let mut t = window.start();
        while t <= window.end() {
            let x = x_of(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#ddd"/><text x="{x}" y="{}" text-anchor="middle">{t}</text>"##,
                SVG_TOP - 8,
                height - 16,
                SVG_TOP - 12
            );
            t += step;
        }
    }
    for (row, (res, bars)) in rows.iter().enumerate() {
        let y = SVG_TOP + row as i64 * SVG_ROW;
        let _ = writeln!(
            out,
            r#"<text x="4" y="{}">{res}</text>"#,
            y + SVG_ROW / 2 + 3
        );
        for (n, bar) in bars.iter().enumerate() {
            let fill = if n % 2 == 0 { "#8ab6d6" } else { "#f2c57c" };
            let x = x_of(bar.start);
            let w = (bar.end - bar.start) * SVG_UNIT;
            let _ = writeln!(
                out,
                r##"<rect x="{x}" y="{}" width="{w}" height="{}" fill="{fill}" stroke="#333"/><text x="{}" y="{}" text-anchor="middle">{}</text>"##,
                y + 4,
                SVG_ROW - 8,
                x + w / 2,
                y + SVG_ROW / 2 + 3,
                label(bar.task)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
