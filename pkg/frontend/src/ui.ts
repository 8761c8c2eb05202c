/**
 * DOM wiring: connection controls, push-to-talk capture, N-best
 * confirmation, the document surrogate, and the action log.
 */

import { PadSession, Transport } from "./session.js";
import { encodeCapturedAudio } from "./wav.js";

class WebSocketTransport implements Transport {
  constructor(private ws: WebSocket) {}

  sendText(line: string): void {
    this.ws.send(line + "\n");
  }

  sendBytes(data: Uint8Array): void {
    this.ws.send(data);
  }
}

export class Reconnector {
  private delayMs = 500;
  private timer: number | null = null;
  private manualClose = false;
  private ws: WebSocket | null = null;

  constructor(private session: PadSession,
              private addressOf: () => string) {}

  connect(): void {
    this.manualClose = false;
    this.open();
  }

  disconnect(): void {
    this.manualClose = true;
    if (this.timer !== null) window.clearTimeout(this.timer);
    this.ws?.close();
  }

  private open(): void {
    let ws: WebSocket;
    try {
      ws = new WebSocket(this.addressOf());
    } catch (err) {
      this.session.connectionFailed(`cannot open ${this.addressOf()}: ${err}`);
      this.scheduleRetry();
      return;
    }
    this.ws = ws;
    ws.binaryType = "arraybuffer";
    ws.onopen = () => {
      this.delayMs = 500;
      this.session.attach(new WebSocketTransport(ws));
    };
    ws.onmessage = (ev) => {
      this.session.feed(typeof ev.data === "string"
        ? ev.data : new Uint8Array(ev.data as ArrayBuffer));
    };
    ws.onclose = () => {
      if (this.session.status === "connected") {
        this.session.detach("connection dropped");
      } else {
        this.session.connectionFailed("service unreachable");
      }
      this.scheduleRetry();
    };
    ws.onerror = () => { /* onclose follows */ };
  }

  private scheduleRetry(): void {
    if (this.manualClose) return;
    this.timer = window.setTimeout(() => this.open(), this.delayMs);
    this.delayMs = Math.min(this.delayMs * 2, 8000);
  }
}

class PushToTalk {
  private ctx: AudioContext | null = null;
  private stream: MediaStream | null = null;
  private node: ScriptProcessorNode | null = null;
  private chunks: Float32Array[] = [];
  recording = false;

  async start(): Promise<void> {
    this.stream = await navigator.mediaDevices.getUserMedia({
      audio: { channelCount: 1, echoCancellation: false },
    });
    this.ctx = new AudioContext();
    const source = this.ctx.createMediaStreamSource(this.stream);
    this.node = this.ctx.createScriptProcessor(4096, 1, 1);
    this.chunks = [];
    this.node.onaudioprocess = (ev) => {
      this.chunks.push(new Float32Array(ev.inputBuffer.getChannelData(0)));
    };
    source.connect(this.node);
    this.node.connect(this.ctx.destination);
    this.recording = true;
  }

  /** Stop and return 16 kHz mono 16-bit WAV bytes. */
  async stop(): Promise<Uint8Array> {
    const rate = this.ctx?.sampleRate ?? 48000;
    this.node?.disconnect();
    this.stream?.getTracks().forEach((t) => t.stop());
    await this.ctx?.close();
    this.recording = false;
    let total = 0;
    for (const c of this.chunks) total += c.length;
    const samples = new Float32Array(total);
    let at = 0;
    for (const c of this.chunks) {
      samples.set(c, at);
      at += c.length;
    }
    this.chunks = [];
    return encodeCapturedAudio(samples, rate);
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function wireUp(session: PadSession): void {
  const address = el<HTMLInputElement>("address");
  const connectBtn = el<HTMLButtonElement>("connect");
  const statusDot = el<HTMLSpanElement>("status-dot");
  const statusText = el<HTMLSpanElement>("status-text");
  const bannerBox = el<HTMLDivElement>("banner");
  const wakeBtn = el<HTMLButtonElement>("unset-flag");
  const talkBtn = el<HTMLButtonElement>("talk");
  const upload = el<HTMLInputElement>("upload");
  const nbestBox = el<HTMLDivElement>("nbest");
  const rejectBtn = el<HTMLButtonElement>("reject");
  const textArea = el<HTMLTextAreaElement>("doc");
  const logBox = el<HTMLUListElement>("log");

  const reconnector = new Reconnector(session, () => address.value);
  const ptt = new PushToTalk();
  let connected = false;

  connectBtn.onclick = () => {
    if (connected) {
      reconnector.disconnect();
      connected = false;
      connectBtn.textContent = "Connect";
    } else {
      reconnector.connect();
      connected = true;
      connectBtn.textContent = "Disconnect";
    }
  };

  wakeBtn.onclick = () => session.unsetFlag();
  rejectBtn.onclick = () => session.reject();

  talkBtn.onmousedown = async () => {
    try {
      await ptt.start();
      talkBtn.classList.add("recording");
    } catch (err) {
      session.connectionFailed(`microphone unavailable (${err}); `
        + "use the WAV upload instead");
    }
  };
  talkBtn.onmouseup = async () => {
    if (!ptt.recording) return;
    talkBtn.classList.remove("recording");
    session.sendAudio(await ptt.stop());
  };

  upload.onchange = async () => {
    const file = upload.files?.[0];
    if (!file) return;
    session.sendAudio(new Uint8Array(await file.arrayBuffer()));
    upload.value = "";
  };

  textArea.oninput = () => {
    session.document.text = textArea.value;
  };

  session.onChange(() => {
    statusDot.className = `dot ${session.status} ${session.mode}`;
    statusText.textContent = session.status === "connected"
      ? session.mode : session.status;
    bannerBox.textContent = session.banner ?? "";
    bannerBox.style.display = session.banner ? "block" : "none";
    wakeBtn.disabled = session.status !== "connected"
      || session.mode !== "sleeping";
    talkBtn.disabled = session.status !== "connected";
    rejectBtn.disabled = !session.pending;

    nbestBox.replaceChildren();
    if (session.pending) {
      for (const hyp of session.nbest) {
        const row = document.createElement("div");
        row.className = "hyp";
        const label = document.createElement("span");
        label.textContent = `${hyp.rank}. ${hyp.words.join(" ")} `
          + `(${hyp.score.toFixed(1)})`;
        const btn = document.createElement("button");
        btn.textContent = "Confirm";
        btn.onclick = () => session.confirm(hyp.rank);
        row.append(label, btn);
        nbestBox.append(row);
      }
    }

    if (textArea.value !== session.document.text) {
      textArea.value = session.document.text;
    }
    textArea.style.color = session.document.fontColor;
    textArea.style.fontWeight = session.document.bold ? "bold" : "normal";

    logBox.replaceChildren(...session.log.slice(-12).map((entry) => {
      const item = document.createElement("li");
      item.textContent = `[${entry.what}] ${entry.detail}`;
      return item;
    }));
  });
}
