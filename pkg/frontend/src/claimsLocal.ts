/** Local echo of the coverage formulas for the claims panel.
 *
 * This is the single place the UI recomputes anything the service also
 * computes; the integration suite asserts verdict-for-verdict equality
 * against `/api/claims`.
 */

export interface LocalVerdict {
  threshold: number;
  claim: boolean;
  loss: number;
  severity: number;
}

export function expectedYield(history: number[], window = 10): number {
  if (history.length === 0) throw new Error("empty history");
  const recent = history.slice(-window);
  let total = 0;
  for (const y of recent) total += y;
  return total / recent.length;
}

export function sampleStd(values: number[]): number {
  if (values.length < 2) return 0;
  let total = 0;
  for (const v of values) total += v;
  const mean = total / values.length;
  let ss = 0;
  for (const v of values) ss += (v - mean) * (v - mean);
  return Math.sqrt(ss / (values.length - 1));
}

export function percentLoss(yExpected: number, yActual: number, cPct: number): LocalVerdict {
  const threshold = cPct * yExpected;
  const loss = Math.max(threshold - yActual, 0);
  return { threshold, claim: loss > 0, loss, severity: loss / yExpected };
}

export function stddevLoss(yMu: number, ySigma: number, yActual: number,
                           cSigma: number): LocalVerdict {
  const threshold = yMu - cSigma * ySigma;
  const loss = Math.max(threshold - yActual, 0);
  return { threshold, claim: loss > 0, loss, severity: loss / yMu };
}

export interface LocalClaimsResult {
  yExpected: number;
  historyStd: number;
  percent: LocalVerdict;
  stddev: LocalVerdict | null;
}

export function localClaims(history: number[], yActual: number, cPct: number,
                            cSigma: number, window = 10): LocalClaimsResult {
  const recent = history.slice(-window);
  const mu = expectedYield(recent, window);
  const sigma = sampleStd(recent);
  return {
    yExpected: mu,
    historyStd: sigma,
    percent: percentLoss(mu, yActual, cPct),
    stddev: recent.length >= 2 && mu > 0
      ? stddevLoss(mu, sigma, yActual, cSigma) : null,
  };
}
