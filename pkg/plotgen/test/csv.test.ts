import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import {
  CsvError,
  readDiscovery,
  readDrops,
  readUtilization,
} from '../src/csv';

const HERE = path.dirname(fileURLToPath(import.meta.url));
const BENCH = path.join(HERE, 'fixtures', 'bench');

function tmpCsv(content: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'plotgen-'));
  const file = path.join(dir, 'discovery.csv');
  fs.writeFileSync(file, content);
  return file;
}

describe('fixture parsing', () => {
  it('reads the utilization table', () => {
    const rows = readUtilization(path.join(BENCH, 'utilization.csv'));
    expect(rows).toHaveLength(5760);
    const scenarios = new Set(rows.map((r) => r.scenario));
    expect(scenarios).toEqual(
      new Set(['dec_c6_x100_baseline', 'dec_c6_x100_paced']));
    const first = rows[0];
    expect(typeof first.binStart).toBe('number');
    expect(first.utilization).toBeGreaterThanOrEqual(0);
  });

  it('reads the discovery table', () => {
    const rows = readDiscovery(path.join(BENCH, 'discovery.csv'));
    expect(rows).toHaveLength(12);
    for (const row of rows) {
      expect(row.total).toBe(9);
      expect(row.rate).toBeCloseTo(row.heard / row.total, 5);
    }
  });

  it('reads the drops table', () => {
    const rows = readDrops(path.join(BENCH, 'drops.csv'));
    expect(rows).toHaveLength(4);
    expect(new Set(rows.map((r) => r.phase)))
      .toEqual(new Set(['request', 'reply']));
  });
});

describe('malformed input', () => {
  it('names a missing file', () => {
    expect(() => readDiscovery(path.join(BENCH, 'nope.csv')))
      .toThrowError(/missing file: .*nope\.csv/);
  });

  it('rejects an empty CSV', () => {
    expect(() => readDiscovery(tmpCsv(''))).toThrowError(/empty CSV/);
  });

  it('names a missing column', () => {
    const file = tmpCsv('scenario,client,services_total,rate\n');
    expect(() => readDiscovery(file))
      .toThrowError(/missing column 'services_heard'/);
  });

  it('rejects a ragged row', () => {
    const file = tmpCsv(
      'scenario,client,services_heard,services_total,rate\nrun,C0,9\n');
    expect(() => readDiscovery(file)).toThrowError(/line 2: expected 5/);
  });

  it('names an unparsable number', () => {
    const file = tmpCsv(
      'scenario,client,services_heard,services_total,rate\n'
      + 'run,C0,nine,9,1.0\n');
    expect(() => readDiscovery(file))
      .toThrowError(/column 'services_heard': cannot parse "nine"/);
  });

  it('errors are CsvError instances', () => {
    expect(() => readDrops(path.join(BENCH, 'nope.csv')))
      .toThrowError(CsvError);
  });
});
