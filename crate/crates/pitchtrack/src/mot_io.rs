//! Plain-text interchange in the 10-field MOT layout:
//! `frame,id,x,y,w,h,conf,-1,-1,-1`, one box per line, frames 1-based.
//! Detection files carry -1 in the id column; embedding sidecars hold
//! one comma-separated vector per detection line, in the same order.
//!
//! Writers emit rows in a stable sorted order with two decimals, so
//! equal inputs produce byte-identical files and write/read/write is
//! stable.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::bbox::BoundingBox;
use crate::detection::{Detection, Embedding, EMBED_DIM};
use crate::error::{Error, Result};
use crate::metrics::TrackSet;

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.trim().parse::<f64>().map_err(|_| Error::MotParse {
        line,
        msg: format!("invalid number '{}'", tok.trim()),
    })
}

fn parse_row(raw: &str, line: usize) -> Result<(i64, i64, BoundingBox, f64)> {
    let fields: Vec<&str> = raw.split(',').collect();
    if fields.len() != 10 {
        return Err(Error::MotParse {
            line,
            msg: format!("expected 10 fields, got {}", fields.len()),
        });
    }
    let frame = parse_f64(fields[0], line)? as i64;
    let id = parse_f64(fields[1], line)? as i64;
    let x = parse_f64(fields[2], line)?;
    let y = parse_f64(fields[3], line)?;
    let w = parse_f64(fields[4], line)?;
    let h = parse_f64(fields[5], line)?;
    let conf = parse_f64(fields[6], line)?;
    if frame < 1 {
        return Err(Error::MotParse {
            line,
            msg: format!("frame must be positive, got {frame}"),
        });
    }
    if w <= 0.0 || h <= 0.0 {
        return Err(Error::MotParse {
            line,
            msg: format!("nonpositive box size {w}x{h}"),
        });
    }
    Ok((frame, id, BoundingBox::new(x, y, w, h), conf))
}

pub fn read_tracks(reader: impl Read) -> Result<TrackSet> {
    let mut out = TrackSet::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (frame, id, bbox, _conf) = parse_row(&line, lineno)?;
        if id < 0 {
            return Err(Error::MotParse {
                line: lineno,
                msg: format!("track id must be non-negative, got {id}"),
            });
        }
        out.insert(frame as u32, id as u32, bbox);
    }
    Ok(out)
}

pub fn write_tracks(writer: impl Write, tracks: &TrackSet) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let mut rows: Vec<(u32, u32, &BoundingBox)> = tracks.iter().collect();
    rows.sort_by_key(|(f, id, _)| (*f, *id));
    for (frame, id, b) in rows {
        writeln!(
            w,
            "{},{},{:.2},{:.2},{:.2},{:.2},1.00,-1,-1,-1",
            frame, id, b.x, b.y, b.w, b.h
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_detections(reader: impl Read) -> Result<Vec<Detection>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (frame, _id, bbox, conf) = parse_row(&line, lineno)?;
        out.push(Detection {
            frame: frame as u32,
            bbox,
            confidence: conf,
            embedding: None,
        });
    }
    Ok(out)
}

/// Round to the two decimals the writers print. Ordering on the
/// printed values keeps a reread file's row order stable, where full
/// precision coordinates could break ties the file no longer records.
fn quant2(v: f64) -> f64 {
    format!("{v:.2}").parse().unwrap()
}

fn detection_order(dets: &[Detection]) -> Vec<usize> {
    let keys: Vec<(u32, f64, f64)> = dets
        .iter()
        .map(|d| (d.frame, quant2(d.bbox.x), quant2(d.bbox.y)))
        .collect();
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap());
    order
}

pub fn write_detections(writer: impl Write, dets: &[Detection]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for &i in &detection_order(dets) {
        let d = &dets[i];
        writeln!(
            w,
            "{},-1,{:.2},{:.2},{:.2},{:.2},{:.2},-1,-1,-1",
            d.frame, d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h, d.confidence
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar with one embedding per detection row, same order as the
/// detection file.
pub fn write_embeddings(writer: impl Write, dets: &[Detection]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for &i in &detection_order(dets) {
        let e = dets[i].embedding.ok_or_else(|| Error::MotParse {
            line: i + 1,
            msg: "detection has no embedding".into(),
        })?;
        let row: Vec<String> = e.as_array().iter().map(|v| format!("{v:.6}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Attaches sidecar embeddings to detections read from the matching
/// detection file; row order ties them together.
pub fn read_embeddings(reader: impl Read, dets: &mut [Detection]) -> Result<()> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != EMBED_DIM {
            return Err(Error::MotParse {
                line: lineno,
                msg: format!("expected {} fields, got {}", EMBED_DIM, fields.len()),
            });
        }
        let mut raw = [0.0; EMBED_DIM];
        for (k, tok) in fields.iter().enumerate() {
            raw[k] = parse_f64(tok, lineno)?;
        }
        rows.push(Embedding::new(raw).map_err(|_| Error::MotParse {
            line: lineno,
            msg: "degenerate embedding row".into(),
        })?);
    }
    if rows.len() != dets.len() {
        return Err(Error::MotParse {
            line: rows.len(),
            msg: format!(
                "embedding count {} does not match detection count {}",
                rows.len(),
                dets.len()
            ),
        });
    }
    for (d, e) in dets.iter_mut().zip(rows) {
        d.embedding = Some(e);
    }
    Ok(())
}

pub fn read_tracks_file(path: impl AsRef<Path>) -> Result<TrackSet> {
    read_tracks(File::open(path)?)
}

pub fn write_tracks_file(path: impl AsRef<Path>, tracks: &TrackSet) -> Result<()> {
    write_tracks(File::create(path)?, tracks)
}

pub fn read_detections_file(path: impl AsRef<Path>) -> Result<Vec<Detection>> {
    read_detections(File::open(path)?)
}

pub fn write_detections_file(path: impl AsRef<Path>, dets: &[Detection]) -> Result<()> {
    write_detections(File::create(path)?, dets)
}

/// Sidecar path for a detection file: `dets.txt` -> `dets.emb.csv`.
pub fn embeddings_path(det_path: impl AsRef<Path>) -> std::path::PathBuf {
    det_path.as_ref().with_extension("emb.csv")
}
