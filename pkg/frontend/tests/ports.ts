// Fixed ports for the backends the global setup spawns.
export const STUB_BACKEND = "http://127.0.0.1:8655";
export const REPLAY_BACKEND = "http://127.0.0.1:8656";
