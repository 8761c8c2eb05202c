/**
 * Wire protocol: UTF-8 lines from the service, line/binary framing to it.
 *
 * Client -> service: HELLO, UNSET_FLAG, SET_FLAG, BYE as single lines;
 * AUDIO <nbytes> followed by exactly nbytes of WAV payload.
 * Service -> client: STATE <mode>, WAKE_DETECTED <name>,
 * HYP <rank> <score> <words...>, NO_SPEECH, ERROR <code> <text...>.
 */

export type Mode = "sleeping" | "listening" | "executing";

export type ServerMessage =
  | { kind: "state"; mode: Mode }
  | { kind: "wake"; name: string }
  | { kind: "hyp"; rank: number; score: number; words: string[] }
  | { kind: "no_speech" }
  | { kind: "error"; code: string; text: string }
  | { kind: "unknown"; raw: string };

export function parseServerLine(line: string): ServerMessage {
  const parts = line.trim().split(/\s+/);
  switch (parts[0]) {
    case "STATE": {
      const mode = parts[1] as Mode;
      if (mode === "sleeping" || mode === "listening" || mode === "executing") {
        return { kind: "state", mode };
      }
      return { kind: "unknown", raw: line };
    }
    case "WAKE_DETECTED":
      return { kind: "wake", name: parts.slice(1).join(" ") };
    case "HYP": {
      const rank = Number(parts[1]);
      const score = Number(parts[2]);
      const words = parts.slice(3);
      if (!Number.isFinite(rank) || Number.isNaN(score) || words.length === 0) {
        return { kind: "unknown", raw: line };
      }
      return { kind: "hyp", rank, score, words };
    }
    case "NO_SPEECH":
      return { kind: "no_speech" };
    case "ERROR":
      return { kind: "error", code: parts[1] ?? "", text: parts.slice(2).join(" ") };
    default:
      return { kind: "unknown", raw: line };
  }
}

/** Frame an AUDIO message: header line plus the raw payload bytes. */
export function encodeAudioMessage(payload: Uint8Array): Uint8Array {
  const header = new TextEncoder().encode(`AUDIO ${payload.length}\n`);
  const out = new Uint8Array(header.length + payload.length);
  out.set(header, 0);
  out.set(payload, header.length);
  return out;
}

/** Reassembles newline-delimited lines from arbitrary byte chunks. */
export class LineSplitter {
  private buffer = "";
  private decoder = new TextDecoder();

  push(chunk: Uint8Array | string): string[] {
    this.buffer += typeof chunk === "string"
      ? chunk
      : this.decoder.decode(chunk, { stream: true });
    const lines: string[] = [];
    for (;;) {
      const at = this.buffer.indexOf("\n");
      if (at < 0) break;
      lines.push(this.buffer.slice(0, at));
      this.buffer = this.buffer.slice(at + 1);
    }
    return lines;
  }
}
