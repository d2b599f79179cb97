/**
 * Readers for the three CSV families the simulator exports.
 *
 * The schemas are fixed (flat, comma-separated, no quoting), so parsing is
 * a strict split: any missing file, empty file, missing column, or
 * non-numeric field is reported by name instead of silently skipped.
 */
import * as fs from 'node:fs';
import * as path from 'node:path';

export class CsvError extends Error {}

export const UTILIZATION_COLUMNS = [
  'scenario', 'link', 'bin_start_s', 'bits', 'utilization',
] as const;
export const DISCOVERY_COLUMNS = [
  'scenario', 'client', 'services_heard', 'services_total', 'rate',
] as const;
export const DROPS_COLUMNS = [
  'scenario', 'phase', 'sent', 'dropped', 'rate',
] as const;

export interface UtilizationRow {
  scenario: string;
  link: string;
  binStart: number;
  bits: number;
  utilization: number;
}

export interface DiscoveryRow {
  scenario: string;
  client: string;
  heard: number;
  total: number;
  rate: number;
}

export interface DropsRow {
  scenario: string;
  phase: string;
  sent: number;
  dropped: number;
  rate: number;
}

function readTable(
  filePath: string,
  columns: readonly string[],
): Record<string, string>[] {
  if (!fs.existsSync(filePath)) {
    throw new CsvError(`missing file: ${filePath}`);
  }
  const name = path.basename(filePath);
  const text = fs.readFileSync(filePath, 'utf8').trim();
  if (text === '') {
    throw new CsvError(`${name}: empty CSV`);
  }
  const lines = text.split(/\r?\n/);
  const header = lines[0].split(',');
  for (const column of columns) {
    if (!header.includes(column)) {
      throw new CsvError(`${name}: missing column '${column}'`);
    }
  }
  return lines.slice(1).map((line, index) => {
    const parts = line.split(',');
    if (parts.length !== header.length) {
      throw new CsvError(
        `${name}: line ${index + 2}: expected ${header.length} fields, ` +
        `got ${parts.length}`);
    }
    const row: Record<string, string> = {};
    header.forEach((column, i) => { row[column] = parts[i]; });
    return row;
  });
}

function toNumber(value: string, filePath: string, column: string): number {
  const parsed = Number(value);
  if (value === '' || Number.isNaN(parsed)) {
    throw new CsvError(
      `${path.basename(filePath)}: column '${column}': ` +
      `cannot parse ${JSON.stringify(value)}`);
  }
  return parsed;
}

export function readUtilization(filePath: string): UtilizationRow[] {
  return readTable(filePath, UTILIZATION_COLUMNS).map((row) => ({
    scenario: row.scenario,
    link: row.link,
    binStart: toNumber(row.bin_start_s, filePath, 'bin_start_s'),
    bits: toNumber(row.bits, filePath, 'bits'),
    utilization: toNumber(row.utilization, filePath, 'utilization'),
  }));
}

export function readDiscovery(filePath: string): DiscoveryRow[] {
  return readTable(filePath, DISCOVERY_COLUMNS).map((row) => ({
    scenario: row.scenario,
    client: row.client,
    heard: toNumber(row.services_heard, filePath, 'services_heard'),
    total: toNumber(row.services_total, filePath, 'services_total'),
    rate: toNumber(row.rate, filePath, 'rate'),
  }));
}

export function readDrops(filePath: string): DropsRow[] {
  return readTable(filePath, DROPS_COLUMNS).map((row) => ({
    scenario: row.scenario,
    phase: row.phase,
    sent: toNumber(row.sent, filePath, 'sent'),
    dropped: toNumber(row.dropped, filePath, 'dropped'),
    rate: toNumber(row.rate, filePath, 'rate'),
  }));
}
