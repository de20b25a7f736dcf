use std::io;

use tokio::io::{AsyncBufRead, AsyncBufReadExt, AsyncWrite, AsyncWriteExt, BufReader};
use tokio::net::TcpListener;
use tracing::{debug, info, warn};
use wandercode_core::protocol::Session;
use wandercode_core::Engine;

/// Runs one session until the reader reaches end of input.
pub async fn serve_lines<R, W>(engine: Engine, reader: R, mut writer: W) -> io::Result<()>
where
    R: AsyncBufRead + Unpin,
    W: AsyncWrite + Unpin,
{
    let mut session = Session::new(engine);
    let mut lines = reader.lines();
    while let Some(line) = lines.next_line().await? {
        if line.trim().is_empty() {
            continue;
        }
        debug!(request = %line, "line in");
        let mut out = String::new();
        for msg in session.handle_line(&line) {
            out.push_str(&msg.to_line());
            out.push('\n');
        }
        writer.write_all(out.as_bytes()).await?;
        writer.flush().await?;
    }
    Ok(())
}

pub async fn serve_stdio(engine: Engine) -> io::Result<()> {
    let stdin = BufReader::new(tokio::io::stdin());
    serve_lines(engine, stdin, tokio::io::stdout()).await
}

/// Accepts connections forever, one independent session per connection.
pub async fn serve_tcp(engine: Engine, listener: TcpListener) -> io::Result<()> {
    info!(addr = %listener.local_addr()?, "listening for protocol connections");
    loop {
        let (stream, peer) = listener.accept().await?;
        let engine = engine.clone();
        tokio::spawn(async move {
            debug!(%peer, "session opened");
            let (read, write) = stream.into_split();
            if let Err(e) = serve_lines(engine, BufReader::new(read), write).await {
                warn!(%peer, error = %e, "session ended with error");
            }
            debug!(%peer, "session closed");
        });
    }
}
