/** Wire types mirroring the service's JSON responses (croprisk-api/1). */
export {};
