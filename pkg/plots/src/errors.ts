/** Error raised when a CSV lacks required columns or values. */
export class MissingColumns extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'MissingColumns';
  }
}

/** Error raised when too few rows rise above the Monte Carlo noise floor. */
export class TooFewPoints extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'TooFewPoints';
  }
}
