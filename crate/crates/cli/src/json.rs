//! JSON output with every float written to 17 significant digits.

use std::io::{self, Write};

use fmsys::{ComplexMatrix, ComplexVector, C64};
use serde::Serialize;
use serde_json::ser::Formatter;

/// `[re, im]`.
pub type Pair = [f64; 2];

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

pub fn vector_pairs(v: &ComplexVector) -> Vec<Pair> {
    v.iter().copied().map(pair).collect()
}

/// Pretty layout with scalar-only arrays kept on one line, e.g. `[1.0e0, 0.0e0]`,
/// and every float written as `{:.16e}`.
#[derive(Default)]
struct Layout {
    frames: Vec<Frame>,
    pending_item: Option<bool>,
}

struct Frame {
    multiline: bool,
    nonempty: bool,
}

macro_rules! scalar {
    ($($name:ident: $t:ty),*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W, value: $t) -> io::Result<()> {
            self.before_value(w, false)?;
            write!(w, "{value}")
        })*
    };
}

impl Layout {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.frames.len() {
            w.write_all(b"  ")?;
        }
        Ok(())
    }

    fn before_value<W: ?Sized + Write>(&mut self, w: &mut W, container: bool) -> io::Result<()> {
        let Some(first) = self.pending_item.take() else {
            return Ok(());
        };
        if !first {
            w.write_all(b",")?;
        }
        let frame = self.frames.last_mut().expect("array item inside an array");
        frame.nonempty = true;
        frame.multiline |= container;
        if frame.multiline {
            self.newline(w)
        } else if first {
            Ok(())
        } else {
            w.write_all(b" ")
        }
    }

    fn open<W: ?Sized + Write>(&mut self, w: &mut W, bracket: &[u8], multiline: bool) -> io::Result<()> {
        self.before_value(w, true)?;
        self.frames.push(Frame { multiline, nonempty: false });
        w.write_all(bracket)
    }

    fn close<W: ?Sized + Write>(&mut self, w: &mut W, bracket: &[u8]) -> io::Result<()> {
        let frame = self.frames.pop().expect("balanced brackets");
        if frame.multiline && frame.nonempty {
            self.newline(w)?;
        }
        w.write_all(bracket)
    }
}

impl Formatter for Layout {
    scalar!(write_i8: i8, write_i16: i16, write_i32: i32, write_i64: i64, write_i128: i128);
    scalar!(write_u8: u8, write_u16: u16, write_u32: u32, write_u64: u64, write_u128: u128);
    scalar!(write_bool: bool);

    fn write_null<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.before_value(w, false)?;
        w.write_all(b"null")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        self.before_value(w, false)?;
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn begin_string<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.before_value(w, false)?;
        w.write_all(b"\"")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.open(w, b"[", false)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.close(w, b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, _: &mut W, first: bool) -> io::Result<()> {
        self.pending_item = Some(first);
        Ok(())
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _: &mut W) -> io::Result<()> {
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.open(w, b"{", true)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.close(w, b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.frames.last_mut().expect("key inside an object").nonempty = true;
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _: &mut W) -> io::Result<()> {
        Ok(())
    }
}

pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Layout::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}
