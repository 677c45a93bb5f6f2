//! Frame sources: a directory of PPM images or a RAWVIDEO byte stream.

use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::features::Frame;
use crate::formats::{decode_flow, decode_ppm, RawVideoReader};

/// `*.ppm` files of a directory in lexicographic order. With `load_flow`,
/// each frame picks up the `<stem>.flo32` sidecar next to it.
pub struct ImageDirSource {
    paths: std::vec::IntoIter<PathBuf>,
    load_flow: bool,
    size: Option<(usize, usize)>,
    next_index: u64,
}

impl ImageDirSource {
    pub fn open(dir: &Path, load_flow: bool) -> Result<Self> {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "ppm"))
            .collect();
        paths.sort();
        Ok(ImageDirSource {
            paths: paths.into_iter(),
            load_flow,
            size: None,
            next_index: 0,
        })
    }

    pub fn remaining(&self) -> usize {
        self.paths.len()
    }

    fn load(&mut self, path: PathBuf) -> Result<Frame> {
        let bytes = fs::read(&path)?;
        let frame = decode_ppm(&bytes, self.next_index)
            .map_err(|e| Error::Decode(format!("{}: {e}", path.display())))?;
        match self.size {
            None => self.size = Some((frame.width, frame.height)),
            Some((w, h)) if (w, h) != (frame.width, frame.height) => {
                return Err(Error::Decode(format!(
                    "{} is {}x{}, earlier frames are {w}x{h}",
                    path.display(),
                    frame.width,
                    frame.height
                )))
            }
            Some(_) => {}
        }
        let frame = if self.load_flow {
            let flow_path = path.with_extension("flo32");
            let (w, h, flow) = decode_flow(&fs::read(&flow_path)?)
                .map_err(|e| Error::Decode(format!("{}: {e}", flow_path.display())))?;
            if (w, h) != (frame.width, frame.height) {
                return Err(Error::Decode(format!(
                    "{} is {w}x{h}, frame is {}x{}",
                    flow_path.display(),
                    frame.width,
                    frame.height
                )));
            }
            frame.with_flow(flow)?
        } else {
            frame
        };
        self.next_index += 1;
        Ok(frame)
    }
}

impl Iterator for ImageDirSource {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        let path = self.paths.next()?;
        Some(self.load(path))
    }
}

/// An opened input plus the frame rate it advertises, if any.
pub struct OpenedSource {
    pub frames: Box<dyn Iterator<Item = Result<Frame>>>,
    pub fps: Option<f64>,
}

/// Opens `spec`: `-` reads a RAWVIDEO stream from stdin, a directory is
/// read as PPM images, any other path as a RAWVIDEO file.
pub fn open_source(spec: &str, load_flow: bool) -> Result<OpenedSource> {
    if spec == "-" {
        if load_flow {
            return Err(Error::Config("optical flow sidecars need an image directory".into()));
        }
        let stdin: Box<dyn BufRead> = Box::new(BufReader::new(io::stdin()));
        return raw_stream(stdin);
    }
    let path = Path::new(spec);
    if path.is_dir() {
        Ok(OpenedSource {
            frames: Box::new(ImageDirSource::open(path, load_flow)?),
            fps: None,
        })
    } else if path.is_file() {
        if load_flow {
            return Err(Error::Config("optical flow sidecars need an image directory".into()));
        }
        raw_stream(Box::new(BufReader::new(fs::File::open(path)?)))
    } else {
        Err(Error::Io(io::Error::new(
            io::ErrorKind::NotFound,
            format!("{spec}: no such file or directory"),
        )))
    }
}

fn raw_stream(input: Box<dyn BufRead>) -> Result<OpenedSource> {
    let reader = RawVideoReader::new(input)?;
    let fps = Some(reader.fps);
    Ok(OpenedSource {
        frames: Box::new(reader),
        fps,
    })
}

/// Writes frames as `<dir>/<index:06>.ppm`.
pub fn write_ppm_dir(dir: &Path, frames: &[Frame]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for f in frames {
        fs::write(dir.join(format!("{:06}.ppm", f.index)), crate::formats::encode_ppm(f))?;
    }
    Ok(())
}
