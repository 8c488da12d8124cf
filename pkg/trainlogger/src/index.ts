export { LogSession } from "./session.js";
export type { SessionOptions, Split } from "./session.js";
