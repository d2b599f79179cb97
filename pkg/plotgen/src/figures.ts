/**
 * Chart builders: one echarts option per figure, straight from CSV rows.
 *
 * Three families: utilization time series (one figure per scenario, one
 * line per router-to-router link), discovery bars (one figure per
 * baseline/paced pair, bars grouped per client), and drop-rate bars (one
 * figure per layout, reply phase only).
 */
import type { EChartsOption } from 'echarts';

import { DiscoveryRow, DropsRow, UtilizationRow } from './csv';

export interface Figure {
  name: string;
  option: EChartsOption;
}

const ROUTER_LINK = /^R\d+->R\d+$/;
const POLICIES = ['baseline', 'paced'] as const;

/** Split a scenario name like "dec_c6_x100_paced_planner" into the cell
 * it belongs to ("dec_c6_x100_planner") and its reply policy. */
export function splitScenario(
  name: string,
): { cell: string; policy: string | null } {
  for (const policy of POLICIES) {
    const token = `_${policy}`;
    if (name.includes(token)) {
      return { cell: name.replace(token, ''), policy };
    }
  }
  return { cell: name, policy: null };
}

function groupBy<T>(rows: T[], key: (row: T) => string): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = groups.get(k);
    if (bucket === undefined) {
      groups.set(k, [row]);
    } else {
      bucket.push(row);
    }
  }
  return groups;
}

function numericSuffix(label: string): number {
  const match = label.match(/(\d+)$/);
  return match === null ? 0 : Number(match[1]);
}

export function utilizationFigures(rows: UtilizationRow[]): Figure[] {
  const figures: Figure[] = [];
  for (const [scenario, scenarioRows] of groupBy(rows, (r) => r.scenario)) {
    const shared = scenarioRows.filter((r) => ROUTER_LINK.test(r.link));
    if (shared.length === 0) {
      continue;
    }
    const binStarts = [...new Set(shared.map((r) => r.binStart))]
      .sort((a, b) => a - b);
    const links = [...new Set(shared.map((r) => r.link))].sort();
    const series = links.map((link) => {
      const byBin = new Map(shared.filter((r) => r.link === link)
        .map((r) => [r.binStart, r.utilization]));
      return {
        name: link,
        type: 'line' as const,
        symbol: 'none' as const,
        data: binStarts.map((bin) => byBin.get(bin) ?? 0),
      };
    });
    figures.push({
      name: `utilization_${scenario}`,
      option: {
        animation: false,
        title: { text: `Shared-link utilization — ${scenario}` },
        legend: { data: links, top: 28 },
        xAxis: {
          type: 'category',
          name: 'time (s)',
          data: binStarts.map((bin) => bin.toFixed(2)),
        },
        yAxis: { type: 'value', name: 'utilization', min: 0, max: 1 },
        series,
      },
    });
  }
  return figures;
}

export function discoveryFigures(rows: DiscoveryRow[]): Figure[] {
  const figures: Figure[] = [];
  const cells = groupBy(rows, (r) => splitScenario(r.scenario).cell);
  for (const [cell, cellRows] of cells) {
    const clients = [...new Set(cellRows.map((r) => r.client))]
      .sort((a, b) => numericSuffix(a) - numericSuffix(b));
    const present = POLICIES.filter((policy) => cellRows.some(
      (r) => splitScenario(r.scenario).policy === policy));
    const series = present.map((policy) => {
      const byClient = new Map(cellRows
        .filter((r) => splitScenario(r.scenario).policy === policy)
        .map((r) => [r.client, r.rate]));
      return {
        name: policy,
        type: 'bar' as const,
        data: clients.map((client) => byClient.get(client) ?? 0),
      };
    });
    figures.push({
      name: `discovery_${cell}`,
      option: {
        animation: false,
        title: { text: `Services heard per client — ${cell}` },
        legend: { data: [...present], top: 28 },
        xAxis: { type: 'category', name: 'client', data: clients },
        yAxis: { type: 'value', name: 'discovery rate', min: 0, max: 1 },
        series,
      },
    });
  }
  return figures;
}

export function dropsFigures(rows: DropsRow[]): Figure[] {
  const replies = rows.filter((r) => r.phase === 'reply');
  const figures: Figure[] = [];
  const layouts = groupBy(replies, (r) => r.scenario.split('_')[0]);
  for (const [layout, layoutRows] of layouts) {
    const cells = [...new Set(layoutRows.map(
      (r) => splitScenario(r.scenario).cell))].sort();
    const series = POLICIES.map((policy) => {
      const byCell = new Map(layoutRows
        .filter((r) => splitScenario(r.scenario).policy === policy)
        .map((r) => [splitScenario(r.scenario).cell, r.rate]));
      return {
        name: policy,
        type: 'bar' as const,
        data: cells.map((cell) => byCell.get(cell) ?? 0),
      };
    });
    figures.push({
      name: `drops_${layout}`,
      option: {
        animation: false,
        title: { text: `Reply drop rate — ${layout}` },
        legend: { data: [...POLICIES], top: 28 },
        xAxis: { type: 'category', name: 'scenario', data: cells },
        yAxis: { type: 'value', name: 'drop rate', min: 0 },
        series,
      },
    });
  }
  return figures;
}

/** Index of the first strict local maximum that rises above the series
 * median — i.e. the first spike above the steady plateau. */
export function firstPeakIndex(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const median = sorted[Math.floor(sorted.length / 2)];
  for (let i = 0; i < values.length; i += 1) {
    const left = i === 0 ? -Infinity : values[i - 1];
    const right = i === values.length - 1 ? -Infinity : values[i + 1];
    if (values[i] > median && values[i] > left && values[i] >= right) {
      return i;
    }
  }
  return -1;
}
