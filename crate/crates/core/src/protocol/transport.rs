use std::cell::RefCell;
use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::rc::Rc;

use super::message::Message;
use crate::error::{Error, Result};

/// One endpoint of a message channel.
pub trait Transport {
    fn send(&mut self, msg: &Message) -> Result<()>;
    /// Next incoming message. Callers only ask when one is owed to them.
    fn recv(&mut self) -> Result<Message>;
}

type Queue = Rc<RefCell<VecDeque<String>>>;

/// In-process endpoint; messages still travel as JSON text.
pub struct MemoryTransport {
    inbox: Queue,
    outbox: Queue,
}

impl MemoryTransport {
    /// Two connected endpoints.
    pub fn pair() -> (MemoryTransport, MemoryTransport) {
        let a: Queue = Rc::default();
        let b: Queue = Rc::default();
        (
            MemoryTransport {
                inbox: a.clone(),
                outbox: b.clone(),
            },
            MemoryTransport {
                inbox: b,
                outbox: a,
            },
        )
    }
}

impl Transport for MemoryTransport {
    fn send(&mut self, msg: &Message) -> Result<()> {
        self.outbox.borrow_mut().push_back(msg.to_line());
        Ok(())
    }

    fn recv(&mut self) -> Result<Message> {
        let line = self
            .inbox
            .borrow_mut()
            .pop_front()
            .ok_or_else(|| Error::Transport("no message waiting".into()))?;
        serde_json::from_str(&line).map_err(|e| Error::Transport(e.to_string()))
    }
}

/// Newline-delimited JSON over any byte stream.
pub struct StreamTransport<R: Read, W: Write> {
    reader: BufReader<R>,
    writer: W,
}

impl<R: Read, W: Write> StreamTransport<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        StreamTransport {
            reader: BufReader::new(reader),
            writer,
        }
    }
}

impl<R: Read, W: Write> Transport for StreamTransport<R, W> {
    fn send(&mut self, msg: &Message) -> Result<()> {
        let mut line = msg.to_line();
        line.push('\n');
        self.writer
            .write_all(line.as_bytes())
            .and_then(|_| self.writer.flush())
            .map_err(|e| Error::Transport(e.to_string()))
    }

    fn recv(&mut self) -> Result<Message> {
        let mut line = String::new();
        let n = self
            .reader
            .read_line(&mut line)
            .map_err(|e| Error::Transport(e.to_string()))?;
        if n == 0 {
            return Err(Error::Transport("stream closed".into()));
        }
        serde_json::from_str(line.trim_end()).map_err(|e| Error::Transport(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::AngleIndex;

    #[test]
    fn memory_pair_is_fifo() {
        let (mut a, mut b) = MemoryTransport::pair();
        a.send(&Message::Done).unwrap();
        a.send(&Message::MeasureRequest {
            qubit: 1,
            angle: AngleIndex::new(2),
        })
        .unwrap();
        assert_eq!(b.recv().unwrap(), Message::Done);
        assert!(matches!(
            b.recv().unwrap(),
            Message::MeasureRequest { qubit: 1, .. }
        ));
        assert!(b.recv().is_err());
    }

    #[test]
    fn stream_round_trip() {
        let mut buf = Vec::new();
        {
            let mut t = StreamTransport::new(std::io::empty(), &mut buf);
            t.send(&Message::Done).unwrap();
            t.send(&Message::OutputTransfer { qubits: vec![4] })
                .unwrap();
        }
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"type\":\"done\"}\n{\"type\":\"output_transfer\",\"payload\":{\"qubits\":[4]}}\n"
        );
        let mut t = StreamTransport::new(buf.as_slice(), std::io::sink());
        assert_eq!(t.recv().unwrap(), Message::Done);
        assert_eq!(
            t.recv().unwrap(),
            Message::OutputTransfer { qubits: vec![4] }
        );
        assert!(t.recv().is_err());
    }
}
