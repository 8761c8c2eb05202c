import { PadSession } from "./session.js";
import { wireUp } from "./ui.js";

const session = new PadSession();
wireUp(session);
