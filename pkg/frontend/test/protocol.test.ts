import { describe, expect, it } from "vitest";

import { LineSplitter, encodeAudioMessage, parseServerLine } from "../src/protocol.js";

describe("parseServerLine", () => {
  it("parses STATE", () => {
    expect(parseServerLine("STATE listening"))
      .toEqual({ kind: "state", mode: "listening" });
  });

  it("parses WAKE_DETECTED", () => {
    expect(parseServerLine("WAKE_DETECTED kant"))
      .toEqual({ kind: "wake", name: "kant" });
  });

  it("parses HYP with multi-word command", () => {
    expect(parseServerLine("HYP 2 -494.440560 kulcasayk mal")).toEqual(
      { kind: "hyp", rank: 2, score: -494.44056, words: ["kulcasayk", "mal"] });
  });

  it("parses NO_SPEECH and ERROR", () => {
    expect(parseServerLine("NO_SPEECH")).toEqual({ kind: "no_speech" });
    expect(parseServerLine("ERROR busy another session is active")).toEqual(
      { kind: "error", code: "busy", text: "another session is active" });
  });

  it("flags unknown messages", () => {
    expect(parseServerLine("WHAT is this").kind).toBe("unknown");
    expect(parseServerLine("STATE bogus").kind).toBe("unknown");
  });
});

describe("encodeAudioMessage", () => {
  it("frames header plus payload", () => {
    const payload = new Uint8Array([1, 2, 3, 4, 5]);
    const framed = encodeAudioMessage(payload);
    const text = new TextDecoder().decode(framed.slice(0, 8));
    expect(text).toBe("AUDIO 5\n");
    expect(Array.from(framed.slice(8))).toEqual([1, 2, 3, 4, 5]);
  });
});

describe("LineSplitter", () => {
  it("reassembles lines across chunk boundaries", () => {
    const splitter = new LineSplitter();
    expect(splitter.push("STATE sle")).toEqual([]);
    expect(splitter.push("eping\nWAKE_DET")).toEqual(["STATE sleeping"]);
    expect(splitter.push("ECTED kant\nSTATE listening\n"))
      .toEqual(["WAKE_DETECTED kant", "STATE listening"]);
  });

  it("accepts bytes", () => {
    const splitter = new LineSplitter();
    const lines = splitter.push(new TextEncoder().encode("NO_SPEECH\n"));
    expect(lines).toEqual(["NO_SPEECH"]);
  });
});
