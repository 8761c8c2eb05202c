/**
 * Pad session: mirrors the service state, holds the document surrogate,
 * and enforces the confirmation contract.
 *
 * Invariants: the mirrored mode changes only on STATE messages; the
 * document mutates only inside confirm() on a pending hypothesis, and
 * every confirm/reject is acknowledged to the service with SET_FLAG.
 */

import { LineSplitter, Mode, ServerMessage, encodeAudioMessage,
         parseServerLine } from "./protocol.js";
import { isServiceReadyWav } from "./wav.js";

export interface Transport {
  sendText(line: string): void;
  sendBytes(data: Uint8Array): void;
}

export interface Hypothesis {
  rank: number;
  score: number;
  words: string[];
}

export interface PadDocument {
  text: string;
  fontColor: string;
  bold: boolean;
}

export interface LogEntry {
  what: string;
  detail: string;
}

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

const FONT_COLORS = ["#222222", "#c0392b", "#2471a3", "#1e8449", "#9b59b6"];

/** Editor-style actions keyed by the confirmed command. Commands without
 * an entry are logged but leave the document untouched. */
const WORD_COLORS: Record<string, string> = {
  mal: "#c0392b",
  nal: "#2471a3",
  sal: "#1e8449",
};

export class PadSession {
  mode: Mode = "sleeping";
  status: ConnectionStatus = "disconnected";
  nbest: Hypothesis[] = [];
  pending = false;
  wakeName: string | null = null;
  banner: string | null = null;
  document: PadDocument = { text: "", fontColor: FONT_COLORS[0], bold: false };
  log: LogEntry[] = [];

  private transport: Transport | null = null;
  private splitter = new LineSplitter();
  private listeners: Array<() => void> = [];
  private collecting: Hypothesis[] = [];

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  private addLog(what: string, detail: string): void {
    this.log.push({ what, detail });
  }

  /** Attach a live transport and greet the service. */
  attach(transport: Transport): void {
    this.transport = transport;
    this.splitter = new LineSplitter();
    this.status = "connected";
    this.banner = null;
    transport.sendText("HELLO");
    this.addLog("connect", "session opened");
    this.notify();
  }

  /** The transport dropped; the next STATE message re-synchronizes. */
  detach(reason: string): void {
    this.transport = null;
    this.status = "disconnected";
    this.pending = false;
    this.banner = reason;
    this.addLog("disconnect", reason);
    this.notify();
  }

  connectionFailed(reason: string): void {
    this.status = "disconnected";
    this.banner = reason;
    this.notify();
  }

  /** Feed raw bytes (or text) received from the service. */
  feed(chunk: Uint8Array | string): void {
    for (const line of this.splitter.push(chunk)) {
      if (line.trim().length) this.handleMessage(parseServerLine(line));
    }
  }

  private handleMessage(msg: ServerMessage): void {
    switch (msg.kind) {
      case "state":
        this.mode = msg.mode;
        if (msg.mode === "executing") {
          // The HYP list that preceded this STATE is now actionable.
          this.nbest = this.collecting;
          this.collecting = [];
          this.pending = this.nbest.length > 0;
        } else {
          this.pending = false;
          if (msg.mode === "sleeping") this.wakeName = null;
        }
        break;
      case "hyp":
        this.collecting.push({ rank: msg.rank, score: msg.score,
                               words: msg.words });
        break;
      case "wake":
        this.wakeName = msg.name;
        this.addLog("wake", `service heard its name (${msg.name})`);
        break;
      case "no_speech":
        this.addLog("no-speech", "service heard nothing usable");
        break;
      case "error":
        this.addLog("error", `${msg.code}: ${msg.text}`);
        break;
      case "unknown":
        this.addLog("error", `unparsable message: ${msg.raw}`);
        break;
    }
    this.notify();
  }

  // --- client actions ---

  unsetFlag(): boolean {
    if (!this.transport) return false;
    this.transport.sendText("UNSET_FLAG");
    this.addLog("flag", "unset (start listening)");
    this.notify();
    return true;
  }

  /** Send captured/uploaded WAV bytes; rejects empty or non-WAV input. */
  sendAudio(wav: Uint8Array): boolean {
    if (!this.transport) {
      this.banner = "not connected";
      this.notify();
      return false;
    }
    if (wav.length === 0) {
      this.banner = "nothing recorded";
      this.notify();
      return false;
    }
    if (!isServiceReadyWav(wav)) {
      this.banner = "audio must be PCM mono 16 kHz 16-bit WAV";
      this.notify();
      return false;
    }
    this.banner = null;
    this.transport.sendBytes(encodeAudioMessage(wav));
    this.addLog("audio", `${wav.length} bytes sent`);
    this.notify();
    return true;
  }

  /** Run the confirmed command's pad action, then acknowledge. */
  confirm(rank: number): boolean {
    if (!this.pending || !this.transport) return false;
    const hyp = this.nbest.find((h) => h.rank === rank);
    if (!hyp) return false;
    this.applyAction(hyp.words);
    this.pending = false;
    this.transport.sendText("SET_FLAG");
    this.notify();
    return true;
  }

  /** Discard the pending hypotheses; the document is untouched. */
  reject(): boolean {
    if (!this.pending || !this.transport) return false;
    this.pending = false;
    this.addLog("reject", this.nbest.map((h) => h.words.join(" ")).join(" | "));
    this.transport.sendText("SET_FLAG");
    this.notify();
    return true;
  }

  private applyAction(words: string[]): void {
    const command = words.join(" ");
    if (words[0] === "kulcasayk") {
      const named = words[1] ? WORD_COLORS[words[1]] : undefined;
      if (named) {
        this.document.fontColor = named;
      } else {
        const at = FONT_COLORS.indexOf(this.document.fontColor);
        this.document.fontColor =
          FONT_COLORS[(at + 1) % FONT_COLORS.length];
      }
      this.addLog("execute", `${command} -> font color ${this.document.fontColor}`);
      return;
    }
    if (command === "mwun kal") {
      this.document.bold = !this.document.bold;
      this.addLog("execute", `${command} -> bold ${this.document.bold}`);
      return;
    }
    this.addLog("execute", `${command} (no pad mapping; logged only)`);
  }
}
