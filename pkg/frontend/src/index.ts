export { ApiError, ArenaClient, type FetchLike } from "./api.js";
export * from "./types.js";
export { buildView, type GameView, type LineAnnotation, type MutantMarker } from "./view.js";
export { renderGame, type Icon, type RenderedLine, type Screen, type ScoreRow } from "./render.js";
export { Poller, type PollerOptions } from "./poll.js";
export {
  claimEquivalence,
  counterClaim,
  submitMutant,
  submitTest,
  type ActionResult,
  type Session,
} from "./actions.js";
