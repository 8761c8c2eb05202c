import { describe, expect, it } from "vitest";

import { encodeCapturedAudio, encodeWavPcm16, floatToPcm16,
         isServiceReadyWav, parseWavHeader, resampleLinear,
         TARGET_RATE } from "../src/wav.js";

describe("resampleLinear", () => {
  it("keeps a constant signal constant at 1/3 length", () => {
    const input = new Float32Array(4800).fill(0.5);
    const out = resampleLinear(input, 48000, 16000);
    expect(out.length).toBe(1600);
    for (const v of out) expect(v).toBeCloseTo(0.5, 6);
  });

  it("preserves a linear ramp", () => {
    const input = Float32Array.from({ length: 481 }, (_v, i) => i / 480);
    const out = resampleLinear(input, 48000, 16000);
    for (let i = 1; i < out.length; i++) {
      expect(out[i]).toBeGreaterThan(out[i - 1]);
    }
    expect(out[0]).toBeCloseTo(0, 6);
    expect(out[out.length - 1]).toBeCloseTo(1, 6);
  });

  it("is the identity at equal rates", () => {
    const input = Float32Array.from([0.1, -0.2, 0.3]);
    expect(resampleLinear(input, 16000, 16000)).toBe(input);
  });
});

describe("floatToPcm16", () => {
  it("scales and clamps", () => {
    const out = floatToPcm16(Float32Array.from([0, 1, -1, 2, -2, 0.5]));
    expect(Array.from(out)).toEqual([0, 32767, -32767, 32767, -32767, 16384]);
  });
});

describe("encodeWavPcm16 / parseWavHeader", () => {
  it("produces a PCM mono 16 kHz 16-bit header", () => {
    const wav = encodeWavPcm16(new Int16Array(320), TARGET_RATE);
    const header = parseWavHeader(wav);
    expect(header).not.toBeNull();
    expect(header!.audioFormat).toBe(1);
    expect(header!.channels).toBe(1);
    expect(header!.sampleRate).toBe(16000);
    expect(header!.bitsPerSample).toBe(16);
    expect(header!.dataBytes).toBe(640);
    expect(isServiceReadyWav(wav)).toBe(true);
  });

  it("rejects non-RIFF bytes", () => {
    expect(parseWavHeader(new TextEncoder().encode("x".repeat(64)))).toBeNull();
  });
});

describe("encodeCapturedAudio", () => {
  it("delivers 48 kHz capture as a 16 kHz 16-bit WAV (header-verified)", () => {
    const capture = Float32Array.from(
      { length: 48000 }, (_v, i) => 0.4 * Math.sin(2 * Math.PI * 440 * i / 48000));
    const wav = encodeCapturedAudio(capture, 48000);
    const header = parseWavHeader(wav)!;
    expect(header.sampleRate).toBe(16000);
    expect(header.bitsPerSample).toBe(16);
    expect(header.channels).toBe(1);
    expect(header.dataBytes).toBe(2 * 16000);
    expect(isServiceReadyWav(wav)).toBe(true);
  });
});
