/**
 * Optimistic like toggle: flip the UI immediately, reconcile with the
 * server's count when the call lands, roll back if it fails.
 */

export interface LikeState {
  count: number;
  liked: boolean;
}

export async function toggleLike(
  current: LikeState,
  apply: (state: LikeState) => void,
  send: (liking: boolean) => Promise<{ like_count: number }>,
): Promise<LikeState> {
  const liking = !current.liked;
  const optimistic: LikeState = {
    liked: liking,
    count: current.count + (liking ? 1 : -1),
  };
  apply(optimistic);
  try {
    const response = await send(liking);
    const reconciled: LikeState = { liked: liking, count: response.like_count };
    apply(reconciled);
    return reconciled;
  } catch (err) {
    apply(current);
    throw err;
  }
}
