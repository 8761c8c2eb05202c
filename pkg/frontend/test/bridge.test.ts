/**
 * Bridge integration: a ws client talks through the bridge to a scripted
 * TCP service that speaks the wire protocol.
 */

import net from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { startBridge, BridgeHandle } from "../src/bridge.js";
import { encodeAudioMessage } from "../src/protocol.js";

let tcpServer: net.Server;
let tcpPort: number;
let bridge: BridgeHandle;

beforeAll(async () => {
  // Scripted service: HELLO -> STATE sleeping; AUDIO n -> echoes byte count.
  tcpServer = net.createServer((socket) => {
    let buffer = Buffer.alloc(0);
    let awaiting = 0;
    socket.on("data", (chunk) => {
      buffer = Buffer.concat([buffer, chunk]);
      for (;;) {
        if (awaiting > 0) {
          if (buffer.length < awaiting) return;
          socket.write(`GOT ${awaiting}\n`);
          buffer = buffer.subarray(awaiting);
          awaiting = 0;
          continue;
        }
        const at = buffer.indexOf(0x0a);
        if (at < 0) return;
        const line = buffer.subarray(0, at).toString("utf-8").trim();
        buffer = buffer.subarray(at + 1);
        if (line === "HELLO") socket.write("STATE sleeping\n");
        else if (line.startsWith("AUDIO ")) awaiting = Number(line.slice(6));
        else if (line === "BYE") socket.end();
      }
    });
  });
  await new Promise<void>((resolve) => {
    tcpServer.listen(0, "127.0.0.1", resolve);
  });
  tcpPort = (tcpServer.address() as net.AddressInfo).port;
  bridge = await startBridge(0, "127.0.0.1", tcpPort);
});

afterAll(() => {
  bridge.close();
  tcpServer.close();
});

describe("ws <-> tcp bridge", () => {
  it("relays lines and binary payloads transparently", async () => {
    const ws = new WebSocket(`ws://127.0.0.1:${bridge.port}`);
    const received: string[] = [];
    const lines = new Promise<void>((resolve) => {
      ws.on("message", (data) => {
        received.push(...data.toString("utf-8").split("\n").filter(Boolean));
        if (received.length >= 2) resolve();
      });
    });
    await new Promise<void>((resolve) => ws.on("open", () => resolve()));
    ws.send("HELLO\n");
    ws.send(encodeAudioMessage(new Uint8Array(321)));
    await lines;
    expect(received[0]).toBe("STATE sleeping");
    expect(received[1]).toBe("GOT 321");
    ws.close();
  });
});
