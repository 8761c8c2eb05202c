/**
 * Audio conversion: resample captured float audio to 16 kHz and encode as
 * PCM mono 16-bit WAV (the only format the service accepts).
 */

export const TARGET_RATE = 16000;

/** Linear-interpolation resampler for mono float samples in [-1, 1]. */
export function resampleLinear(samples: Float32Array, inRate: number,
                               outRate: number = TARGET_RATE): Float32Array {
  if (inRate === outRate) return samples;
  if (samples.length === 0) return new Float32Array(0);
  const outLength = Math.max(1, Math.round(samples.length * outRate / inRate));
  const out = new Float32Array(outLength);
  const step = (samples.length - 1) / Math.max(1, outLength - 1);
  for (let i = 0; i < outLength; i++) {
    const pos = i * step;
    const lo = Math.floor(pos);
    const hi = Math.min(lo + 1, samples.length - 1);
    const frac = pos - lo;
    out[i] = samples[lo] * (1 - frac) + samples[hi] * frac;
  }
  return out;
}

export function floatToPcm16(samples: Float32Array): Int16Array {
  const out = new Int16Array(samples.length);
  for (let i = 0; i < samples.length; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]));
    out[i] = Math.round(clamped * 32767);
  }
  return out;
}

/** Encode mono PCM 16-bit samples as a RIFF WAV file. */
export function encodeWavPcm16(samples: Int16Array,
                               sampleRate: number = TARGET_RATE): Uint8Array {
  const dataBytes = samples.length * 2;
  const buffer = new ArrayBuffer(44 + dataBytes);
  const view = new DataView(buffer);
  const ascii = (at: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(at + i, text.charCodeAt(i));
  };
  ascii(0, "RIFF");
  view.setUint32(4, 36 + dataBytes, true);
  ascii(8, "WAVE");
  ascii(12, "fmt ");
  view.setUint32(16, 16, true);          // fmt chunk size
  view.setUint16(20, 1, true);           // PCM
  view.setUint16(22, 1, true);           // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);  // byte rate
  view.setUint16(32, 2, true);           // block align
  view.setUint16(34, 16, true);          // bits per sample
  ascii(36, "data");
  view.setUint32(40, dataBytes, true);
  for (let i = 0; i < samples.length; i++) {
    view.setInt16(44 + 2 * i, samples[i], true);
  }
  return new Uint8Array(buffer);
}

export interface WavHeader {
  audioFormat: number;
  channels: number;
  sampleRate: number;
  bitsPerSample: number;
  dataBytes: number;
}

/** Parse the fmt fields of a RIFF WAV file; null when it is not one. */
export function parseWavHeader(bytes: Uint8Array): WavHeader | null {
  if (bytes.length < 44) return null;
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const tag = (at: number, text: string) => {
    for (let i = 0; i < text.length; i++) {
      if (view.getUint8(at + i) !== text.charCodeAt(i)) return false;
    }
    return true;
  };
  if (!tag(0, "RIFF") || !tag(8, "WAVE")) return null;
  // walk chunks to find fmt and data
  let at = 12;
  let header: Partial<WavHeader> = {};
  while (at + 8 <= bytes.length) {
    const isFmt = tag(at, "fmt ");
    const isData = tag(at, "data");
    const size = view.getUint32(at + 4, true);
    if (isFmt && at + 8 + 16 <= bytes.length) {
      header.audioFormat = view.getUint16(at + 8, true);
      header.channels = view.getUint16(at + 10, true);
      header.sampleRate = view.getUint32(at + 12, true);
      header.bitsPerSample = view.getUint16(at + 22, true);
    }
    if (isData) {
      header.dataBytes = size;
      break;
    }
    at += 8 + size + (size % 2);
  }
  if (header.audioFormat === undefined || header.dataBytes === undefined) {
    return null;
  }
  return header as WavHeader;
}

/** Full capture path: resample to 16 kHz and encode as 16-bit WAV. */
export function encodeCapturedAudio(samples: Float32Array,
                                    captureRate: number): Uint8Array {
  const resampled = resampleLinear(samples, captureRate, TARGET_RATE);
  return encodeWavPcm16(floatToPcm16(resampled), TARGET_RATE);
}

/** True when the bytes are already service-ready (PCM mono 16k/16-bit). */
export function isServiceReadyWav(bytes: Uint8Array): boolean {
  const header = parseWavHeader(bytes);
  return header !== null && header.audioFormat === 1 && header.channels === 1
    && header.sampleRate === TARGET_RATE && header.bitsPerSample === 16
    && header.dataBytes > 0;
}
