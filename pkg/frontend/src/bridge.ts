/**
 * Socket-to-web bridge: relays bytes between a browser WebSocket and the
 * service's TCP line protocol, transparently in both directions.
 *
 *   node dist/bridge.js [--listen 8765] [--target 127.0.0.1:8747]
 */

import net from "node:net";
import { WebSocketServer, WebSocket, RawData } from "ws";

export interface BridgeHandle {
  port: number;
  close(): void;
}

export function startBridge(listenPort: number, targetHost: string,
                            targetPort: number): Promise<BridgeHandle> {
  const wss = new WebSocketServer({ host: "127.0.0.1", port: listenPort });
  wss.on("connection", (ws: WebSocket) => {
    const tcp = net.createConnection({ host: targetHost, port: targetPort });
    const pendingByWs: RawData[] = [];
    let tcpReady = false;
    tcp.on("connect", () => {
      tcpReady = true;
      for (const data of pendingByWs) tcp.write(toBuffer(data));
      pendingByWs.length = 0;
    });
    ws.on("message", (data: RawData) => {
      if (tcpReady) tcp.write(toBuffer(data));
      else pendingByWs.push(data);
    });
    tcp.on("data", (chunk: Buffer) => ws.send(chunk));
    const drop = () => {
      tcp.destroy();
      ws.close();
    };
    ws.on("close", drop);
    ws.on("error", drop);
    tcp.on("close", () => ws.close());
    tcp.on("error", drop);
  });
  return new Promise((resolve, reject) => {
    wss.on("error", reject);
    wss.on("listening", () => {
      const address = wss.address();
      const port = typeof address === "object" && address ? address.port
        : listenPort;
      resolve({ port, close: () => wss.close() });
    });
  });
}

function toBuffer(data: RawData): Buffer {
  if (Buffer.isBuffer(data)) return data;
  if (Array.isArray(data)) return Buffer.concat(data);
  return Buffer.from(data as ArrayBuffer);
}

function parseArgs(argv: string[]): { listen: number; host: string; port: number } {
  let listen = 8765;
  let target = "127.0.0.1:8747";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--listen") listen = Number(argv[++i]);
    else if (argv[i] === "--target") target = argv[++i];
  }
  const at = target.lastIndexOf(":");
  return { listen, host: target.slice(0, at), port: Number(target.slice(at + 1)) };
}

const isMain = process.argv[1]?.endsWith("bridge.js");
if (isMain) {
  const { listen, host, port } = parseArgs(process.argv.slice(2));
  startBridge(listen, host, port).then((handle) => {
    console.log(`bridge: ws://127.0.0.1:${handle.port} -> tcp ${host}:${port}`);
  }).catch((err) => {
    console.error(`bridge failed: ${err}`);
    process.exit(1);
  });
}
