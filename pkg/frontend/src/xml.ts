/** mulberry32: tiny deterministic PRNG, good enough for demo point sets. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Build a point-set XML document in the service's input grammar
 * (ViewData/Data/Feature_Points): uniform random positions, ranks a
 * random permutation of 1..n so priority is independent of position.
 */
export function randomPointsXml(n: number, seed: number): string {
  const rng = mulberry32(seed);
  const ranks = Array.from({ length: n }, (_, i) => i + 1);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [ranks[i], ranks[j]] = [ranks[j]!, ranks[i]!];
  }
  const rows: string[] = [];
  for (let i = 0; i < n; i++) {
    const x = rng().toFixed(9);
    const y = rng().toFixed(9);
    rows.push(
      `      <point rank="${ranks[i]}" key1="PT-${String(ranks[i]).padStart(5, "0")}" x="${x}" y="${y}"/>`,
    );
  }
  return [
    '<?xml version="1.0"?>',
    "<ViewData>",
    "  <Data>",
    `    <Feature_Points nodes="${n}">`,
    ...rows,
    "    </Feature_Points>",
    "  </Data>",
    "</ViewData>",
    "",
  ].join("\n");
}
