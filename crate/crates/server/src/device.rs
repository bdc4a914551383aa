//! Device emulator over TCP or any byte stream (stdio stands in for a serial port).

use std::time::Instant;

use log::info;
use tokio::io::{AsyncBufRead, AsyncBufReadExt, AsyncWrite, AsyncWriteExt, BufReader};
use tokio::net::TcpListener;

use pvsim_core::device::{Emulator, ModuleKind, MAX_LINE};

/// Reads one LF-terminated line, keeping at most `MAX_LINE + 1` bytes so an
/// oversize line is still rejected without buffering all of it.
async fn read_line<R: AsyncBufRead + Unpin>(reader: &mut R, line: &mut Vec<u8>) -> std::io::Result<bool> {
    line.clear();
    loop {
        let buf = reader.fill_buf().await?;
        if buf.is_empty() {
            return Ok(!line.is_empty());
        }
        let (chunk, done) = match buf.iter().position(|&b| b == b'\n') {
            Some(i) => (&buf[..=i], true),
            None => (buf, false),
        };
        let room = (MAX_LINE + 1).saturating_sub(line.len());
        line.extend_from_slice(&chunk[..chunk.len().min(room)]);
        let used = chunk.len();
        reader.consume(used);
        if done {
            return Ok(true);
        }
    }
}

/// Serves one emulator session: commands in arrival order, one reply line each,
/// replies held back until the line has crossed the modeled serial link.
pub async fn run_device_session<R, W>(reader: R, mut writer: W, kind: ModuleKind, debug: bool) -> std::io::Result<()>
where
    R: AsyncBufRead + Unpin,
    W: AsyncWrite + Unpin,
{
    let mut reader = reader;
    let mut emu = Emulator::new(kind, debug);
    let start = Instant::now();
    let mut last = 0.0;
    let mut line = Vec::with_capacity(MAX_LINE + 1);
    while read_line(&mut reader, &mut line).await? {
        let now = start.elapsed().as_secs_f64();
        emu.step(now - last);
        last = now;
        let (reply, arrival) = emu.receive_line(&line, now);
        let wait = arrival - start.elapsed().as_secs_f64();
        if wait > 0.0 {
            tokio::time::sleep(std::time::Duration::from_secs_f64(wait)).await;
        }
        writer.write_all(&reply.to_bytes()).await?;
        writer.flush().await?;
    }
    Ok(())
}

/// Accepts connections forever; each gets a fresh emulator.
pub async fn serve_device_tcp(listener: TcpListener, kind: ModuleKind, debug: bool) -> std::io::Result<()> {
    loop {
        let (stream, peer) = listener.accept().await?;
        info!("device session from {peer}");
        tokio::spawn(async move {
            let (r, w) = stream.into_split();
            if let Err(e) = run_device_session(BufReader::new(r), w, kind, debug).await {
                info!("device session {peer} ended: {e}");
            }
        });
    }
}
